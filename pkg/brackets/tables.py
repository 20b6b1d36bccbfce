"""
Fundamental bracket tables.

A table stores the brackets between generator pairs; the biderivation built
from it by the graded Leibniz rule lives in bracket_engine. Reversed entries
follow from graded antisymmetry: (b,a) = -(-1)^{(e(a)+s)(e(b)+s)} (a,b),
s being the parity shift of the bracket.
"""
import sys
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

sys.path.append(str(Path(__file__).parent.parent))
from gsys_utils import GsysError
from graded.grading import Chart, ChartLevel, VariableKind
from graded.superpoly import SuperPolynomial, left_derivative, sum_polynomials


class BracketError(GsysError):
    """Chart-level mismatch or an inconsistent fundamental table."""


class BracketTable:
    def __init__(self, chart: Chart, parity_shift: int, ghost_shift: int,
                 fundamental: Mapping[Tuple[str, str], SuperPolynomial]):
        self.chart = chart
        self.parity_shift = parity_shift % 2
        self.ghost_shift = ghost_shift
        self.entries: Dict[Tuple[int, int], SuperPolynomial] = {}
        for (a, b), value in fundamental.items():
            ia, ib = chart.index(a), chart.index(b)
            if value.chart != chart:
                raise BracketError(f"Table entry ({a},{b}) lives on another chart")
            self._store(ia, ib, value)
            self._store(ib, ia, value.scale(self.reversal_sign(ia, ib)))
        self.validate()

    def reversal_sign(self, ia: int, ib: int) -> int:
        s = self.parity_shift
        exponent = (int(self.chart.odd[ia]) + s) * (int(self.chart.odd[ib]) + s)
        return -1 if exponent % 2 == 0 else 1

    def _store(self, ia: int, ib: int, value: SuperPolynomial):
        existing = self.entries.get((ia, ib))
        if existing is not None and existing != value:
            names = self.chart.names
            raise BracketError(f"Conflicting table entries for ({names[ia]},{names[ib]})")
        if value:
            self.entries[(ia, ib)] = value

    def validate(self):
        """Every entry must carry the pair's parity and ghost plus the bracket shifts."""
        gradings = self.chart.gradings
        for (ia, ib), value in self.entries.items():
            parity = (gradings[ia].parity + gradings[ib].parity + self.parity_shift) % 2
            ghost = gradings[ia].ghost + gradings[ib].ghost + self.ghost_shift
            if value.grading_values('parity') != {parity} or value.grading_values('ghost') != {ghost}:
                names = self.chart.names
                raise BracketError(f"Entry ({names[ia]},{names[ib]}) = {value.to_text()} has the wrong grading")

    def entry(self, a: str, b: str) -> SuperPolynomial:
        value = self.entries.get((self.chart.index(a), self.chart.index(b)))
        return value if value is not None else SuperPolynomial.zero(self.chart)

    def pairs_by_left(self) -> Dict[int, List[Tuple[int, SuperPolynomial]]]:
        grouped: Dict[int, List[Tuple[int, SuperPolynomial]]] = {}
        for (ia, ib), value in sorted(self.entries.items()):
            grouped.setdefault(ia, []).append((ib, value))
        return grouped

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class ConnectionData:
    """
    Connection coefficients A^C_{iB} on the antighost and ghost bundles.

    Keys are (upper fiber name C, lower fiber name B, base coordinate i);
    values are polynomials in the base coordinates on the extended chart.
    """
    coefficients: Tuple[Tuple[Tuple[str, str, str], SuperPolynomial], ...] = field(default_factory=tuple)

    @classmethod
    def from_mapping(cls, mapping: Mapping[Tuple[str, str, str], SuperPolynomial]) -> 'ConnectionData':
        return cls(tuple(sorted(((k, v) for k, v in mapping.items() if v), key=lambda kv: kv[0])))

    def as_dict(self) -> Dict[Tuple[str, str, str], SuperPolynomial]:
        return dict(self.coefficients)

    def is_flat_zero(self) -> bool:
        return not self.coefficients

    def coefficient(self, upper: str, lower: str, base: str, chart: Chart) -> SuperPolynomial:
        return self.as_dict().get((upper, lower, base), SuperPolynomial.zero(chart))


def flat_odd_table(chart: Chart) -> BracketTable:
    """(phi*_A, phi^A) = 1 for every coordinate; works on the multivector and extended charts."""
    if chart.level not in (ChartLevel.M, ChartLevel.N):
        raise BracketError(f"The odd bracket acts on M- or N-level charts, not {chart.level.value}")
    return _flat_odd_table(chart)


@lru_cache(maxsize=64)
def _flat_odd_table(chart: Chart) -> BracketTable:
    one = SuperPolynomial.constant(chart, 1)
    fundamental = {(v.name, v.partner): one for v in chart.of_kind(VariableKind.MOMENTUM)}
    return BracketTable(chart, 1, -1, fundamental)


def _fiber_bundles(chart: Chart) -> List[List[str]]:
    return [[v.name for v in chart.of_kind(VariableKind.ANTIGHOST_FIBER)],
            [v.name for v in chart.of_kind(VariableKind.GHOST_FIBER)]]


def connection_matrix(connection: ConnectionData, chart: Chart, fibers: List[str],
                      base: str) -> List[List[SuperPolynomial]]:
    """(A_i)_{BC} = A^C_{iB} over one bundle, rows indexed by the lower fiber name."""
    data = connection.as_dict()
    zero = SuperPolynomial.zero(chart)
    return [[data.get((upper, lower, base), zero) for upper in fibers] for lower in fibers]


def curvature(connection: ConnectionData, chart: Chart) -> Dict[Tuple[str, str, str, str], SuperPolynomial]:
    """
    Curvature components (B, C, i, j) -> (d_i A_j - d_j A_i + [A_i, A_j])_{BC}.

    Computed from the coefficients; only nonzero components are returned.
    """
    bases = [v.name for v in chart.of_kind(VariableKind.BASE)]
    result = {}
    for fibers in _fiber_bundles(chart):
        if not fibers:
            continue
        matrices = {b: connection_matrix(connection, chart, fibers, b) for b in bases}
        n = len(fibers)
        for pi, i in enumerate(bases):
            for j in bases[pi + 1:]:
                Ai, Aj = matrices[i], matrices[j]
                for r in range(n):
                    for col in range(n):
                        value = left_derivative(Aj[r][col], i) - left_derivative(Ai[r][col], j)
                        value = value + sum_polynomials(chart, (Ai[r][m] * Aj[m][col] - Aj[r][m] * Ai[m][col]
                                                                for m in range(n)))
                        if value:
                            result[(fibers[r], fibers[col], i, j)] = value
    return result


def twisted_odd_table(chart: Chart, connection: ConnectionData) -> BracketTable:
    """
    Odd table with connection terms, as seen through the long momenta
    x*_i = X*_i + z^B A^C_{iB} z*_C of a canonical chart:

        (x*_i, z^C)   =  z^B A^C_{iB}
        (x*_i, z*_C)  = -A^D_{iC} z*_D
        (x*_i, x*_j)  =  z^B F_{ij,BC} z*_C
    """
    if chart.level is not ChartLevel.N:
        raise BracketError("Connection terms live on the extended chart")
    return _twisted_odd_table(chart, connection)


@lru_cache(maxsize=32)
def _twisted_odd_table(chart: Chart, connection: ConnectionData) -> BracketTable:
    data = connection.as_dict()
    bundles = _fiber_bundles(chart)
    bundle_of = {name: k for k, fibers in enumerate(bundles) for name in fibers}
    for (upper, lower, base), value in data.items():
        if upper not in bundle_of or lower not in bundle_of or bundle_of[upper] != bundle_of[lower]:
            raise BracketError(f"Connection coefficient ({upper},{lower},{base}) mixes or misses fiber variables")
        if chart.variable(base).kind is not VariableKind.BASE:
            raise BracketError(f"Connection coefficient index {base!r} is not a base coordinate")
        if value.variables_used() - {v.name for v in chart.of_kind(VariableKind.BASE)}:
            raise BracketError(f"Connection coefficient ({upper},{lower},{base}) depends on non-base variables")

    var = lambda name: SuperPolynomial.variable(chart, name)
    fundamental: Dict[Tuple[str, str], SuperPolynomial] = {}
    one = SuperPolynomial.constant(chart, 1)
    for v in chart.of_kind(VariableKind.MOMENTUM):
        fundamental[(v.name, v.partner)] = one

    bases = [v.name for v in chart.of_kind(VariableKind.BASE)]
    zero = SuperPolynomial.zero(chart)
    for i in bases:
        xs_i = chart.momentum_of(i).name
        for fibers in bundles:
            for upper in fibers:
                value = sum_polynomials(chart, (var(lower) * data.get((upper, lower, i), zero) for lower in fibers))
                if value:
                    fundamental[(xs_i, upper)] = value
                star = chart.momentum_of(upper).name
                value = sum_polynomials(chart, (data.get((d, upper, i), zero) * var(chart.momentum_of(d).name)
                                                for d in fibers))
                if value:
                    fundamental[(xs_i, star)] = -value

    for (lower, upper, i, j), value in curvature(connection, chart).items():
        key = (chart.momentum_of(i).name, chart.momentum_of(j).name)
        term = var(lower) * value * var(chart.momentum_of(upper).name)
        fundamental[key] = fundamental.get(key, zero) + term
    return BracketTable(chart, 1, -1, fundamental)


def even_table(chart: Chart) -> BracketTable:
    """{dphi*_A, phi^A} = 1 and {dphi^A, phi*_A} = -1 on the odd tangent chart."""
    if chart.level is not ChartLevel.PITN:
        raise BracketError(f"The even bracket acts on the odd tangent chart, not {chart.level.value}")
    return _even_table(chart)


@lru_cache(maxsize=32)
def _even_table(chart: Chart) -> BracketTable:
    one = SuperPolynomial.constant(chart, 1)
    fundamental = {}
    for phi in chart.coordinates():
        star = chart.momentum_of(phi.name)
        fundamental[(chart.velocity_of(star.name).name, phi.name)] = one
        fundamental[(chart.velocity_of(phi.name).name, star.name)] = -one
    return BracketTable(chart, 0, 0, fundamental)
