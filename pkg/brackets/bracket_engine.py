"""
Bracket engine: biderivations from fundamental tables.

    (F, G) = sum over table pairs (a, b) of (F d^R_a) (a, b) (d^L_b G)

The odd bracket acts on the extended chart (or the multivector chart for
Schouten brackets), the even bracket on the odd tangent chart.
"""
import logging
import sys
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Sequence

sys.path.append(str(Path(__file__).parent.parent))
from graded.grading import Chart, ChartLevel, VariableKind, build_tangent_chart
from graded.superpoly import (
    SuperPolynomial, embed, left_derivative, restrict, restrict_to_L, restrict_to_M, right_derivative,
    sum_polynomials,
)
from brackets.tables import BracketError, BracketTable, ConnectionData, even_table, flat_odd_table, twisted_odd_table

logger = logging.getLogger(__name__)

RESTRICT_TO_M = 'to-M'
RESTRICT_TO_L = 'to-L'


def bracket_with_table(table: BracketTable, F: SuperPolynomial, G: SuperPolynomial) -> SuperPolynomial:
    chart = table.chart
    if F.chart != chart or G.chart != chart:
        raise BracketError(f"Bracket operands must live on {chart!r}")
    if not F or not G:
        return SuperPolynomial.zero(chart)
    f_vars = {chart.index(n) for n in F.variables_used()}
    g_vars = {chart.index(n) for n in G.variables_used()}
    right: Dict[int, SuperPolynomial] = {}
    left: Dict[int, SuperPolynomial] = {}
    pieces = []
    for a, row in table.pairs_by_left().items():
        if a not in f_vars:
            continue
        for b, value in row:
            if b not in g_vars:
                continue
            if a not in right:
                right[a] = right_derivative(F, a)
            if b not in left:
                left[b] = left_derivative(G, b)
            if right[a] and left[b]:
                pieces.append(right[a] * value * left[b])
    return sum_polynomials(chart, pieces)


def odd_bracket(F: SuperPolynomial, G: SuperPolynomial, conn: Optional[ConnectionData] = None) -> SuperPolynomial:
    """Odd canonical bracket on the extended chart, twisted when connection data is given."""
    if F.chart.level is not ChartLevel.N:
        raise BracketError(f"odd_bracket expects polynomials on the extended chart, got {F.chart.level.value}")
    if conn is not None and not conn.is_flat_zero():
        return bracket_with_table(twisted_odd_table(F.chart, conn), F, G)
    return bracket_with_table(flat_odd_table(F.chart), F, G)


def even_bracket(F: SuperPolynomial, G: SuperPolynomial) -> SuperPolynomial:
    if F.chart.level is not ChartLevel.PITN:
        raise BracketError(f"even_bracket expects polynomials on the odd tangent chart, got {F.chart.level.value}")
    return bracket_with_table(even_table(F.chart), F, G)


def non_multivector_variables(poly: SuperPolynomial) -> List[str]:
    """Variables other than base coordinates and their momenta x*_i."""
    chart = poly.chart
    found = []
    for name in poly.variables_used():
        var = chart.variable(name)
        if var.kind is VariableKind.BASE:
            continue
        if var.kind is VariableKind.MOMENTUM and chart.variable(var.partner).kind is VariableKind.BASE:
            continue
        found.append(name)
    return sorted(found)


def schouten(U: SuperPolynomial, W: SuperPolynomial) -> SuperPolynomial:
    """Schouten bracket of multivectors encoded by d/dx^i -> x*_i."""
    for poly in (U, W):
        ghosts = non_multivector_variables(poly)
        if ghosts:
            raise BracketError(f"Multivector contains ghost variables: {', '.join(ghosts)}")
    if U.chart.level not in (ChartLevel.M, ChartLevel.N):
        raise BracketError("Schouten brackets act on multivector or extended charts")
    return bracket_with_table(flat_odd_table(U.chart), U, W)


@lru_cache(maxsize=32)
def tangent_chart_of(chart: Chart) -> Chart:
    return chart if chart.level is ChartLevel.PITN else build_tangent_chart(chart)


def to_tangent(F: SuperPolynomial, tangent: Optional[Chart] = None) -> SuperPolynomial:
    if F.chart.level is ChartLevel.PITN:
        return F
    return embed(F, tangent or tangent_chart_of(F.chart))


def delta_element(chart: Chart) -> SuperPolynomial:
    """Delta = sum_A (-1)^{e(A)} dphi^A dphi*_A on the odd tangent chart."""
    chart = tangent_chart_of(chart)
    pieces = []
    for phi in chart.coordinates():
        dphi = SuperPolynomial.variable(chart, chart.velocity_of(phi.name).name)
        dstar = SuperPolynomial.variable(chart, chart.velocity_of(chart.momentum_of(phi.name).name).name)
        pieces.append((dphi * dstar).scale(-1 if phi.is_odd else 1))
    return sum_polynomials(chart, pieces)


def lift_by_delta(F: SuperPolynomial, tangent: Optional[Chart] = None) -> SuperPolynomial:
    """{Delta, F} with F embedded into the odd tangent chart."""
    lifted = to_tangent(F, tangent)
    return even_bracket(delta_element(lifted.chart), lifted)


def restrict_to_N(F: SuperPolynomial) -> SuperPolynomial:
    """Set every velocity to zero, staying on the odd tangent chart."""
    kinds = (VariableKind.VELOCITY, VariableKind.VELOCITY_MOMENTUM)
    return restrict(F, [v.name for v in F.chart.of_kind(*kinds)])


def drop_to_N(F: SuperPolynomial, chart_N: Chart) -> SuperPolynomial:
    """Restrict to the zero section and move the result back to the extended chart."""
    return embed(restrict_to_N(F), chart_N)


def derived_bracket(generator: SuperPolynomial, args: Sequence[SuperPolynomial], restriction: str,
                    conn: Optional[ConnectionData] = None) -> SuperPolynomial:
    """
    Nested bracket (...((gen, a1), a2)..., ak) restricted to M (odd bracket)
    or to the Lagrangian L (even bracket).
    """
    if not args:
        raise BracketError("derived_bracket needs at least one argument")
    if restriction == RESTRICT_TO_M:
        result = generator
        for arg in args:
            arg = arg if arg.chart == generator.chart else embed(arg, generator.chart)
            result = odd_bracket(result, arg, conn)
        return restrict_to_M(result)
    if restriction == RESTRICT_TO_L:
        result = to_tangent(generator)
        for arg in args:
            result = even_bracket(result, to_tangent(arg, result.chart))
        return restrict_to_L(result)
    raise BracketError(f"Unknown restriction {restriction!r}; use {RESTRICT_TO_M} or {RESTRICT_TO_L}")


def delta_derived_bracket(F: SuperPolynomial, G: SuperPolynomial) -> SuperPolynomial:
    """{{Delta, F}, G} restricted to the zero section; equals (-1)^{e(F)} (F, G)."""
    chart_N = F.chart if F.chart.level is ChartLevel.N else None
    lifted = lift_by_delta(F)
    value = restrict_to_N(even_bracket(lifted, to_tangent(G, lifted.chart)))
    return embed(value, chart_N) if chart_N is not None else value


def exterior_derivative(omega: SuperPolynomial) -> SuperPolynomial:
    """d = {Delta, -} restricted to L."""
    return restrict_to_L(lift_by_delta(omega))


# twisted odd entries in long momenta; z runs over ghosts and antighosts
TWISTED_CONVENTIONS = {
    '(x*_i, z^C)': 'z^B A^C_{iB}',
    '(x*_i, z*_C)': '-A^D_{iC} z*_D',
    '(x*_i, x*_j)': 'z^B F_{ij,BC} z*_C',
}


def bracket_conventions(chart: Chart, connection: Optional[ConnectionData] = None) -> Dict[str, object]:
    """
    Sign conventions behind a report: the fundamental pairings of the flat odd
    table (or the even table on the odd tangent chart) and the entries the
    connection adds. The minus sign of (x*_i, z*_C) is the one under which the
    twisted Jacobi identity holds exactly.
    """
    even = chart.level is ChartLevel.PITN
    table = even_table(chart) if even else flat_odd_table(chart)
    names = chart.names
    twisted = connection is not None and not connection.is_flat_zero()
    if twisted:
        logger.info(f"Twisted odd bracket: (x*_i, z*_C) = {TWISTED_CONVENTIONS['(x*_i, z*_C)']}")
    return {
        'bracket': 'even' if even else 'odd',
        'pairings': [f"({names[a]}, {names[b]}) = {v.to_text()}" for (a, b), v in sorted(table.entries.items())],
        'connection': 'twisted' if twisted else 'flat',
        'twisted_entries': dict(TWISTED_CONVENTIONS),
    }
