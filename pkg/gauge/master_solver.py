"""
Koszul-Tate differential, master equation checks and the perturbative
completion of S and V by bounded-degree exact linear algebra.

The recursion runs over resolution degree: at step k the residual of
(S_{<k}, S_{<k}) in resolution degree k-1 is removed by a correction S_k
solving delta S_k = -rho/2; a kernel element of delta is then added when
it also removes the residual in resolution degree k.
"""
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

import pandas as pd
from tqdm import tqdm

sys.path.append(str(Path(__file__).parent.parent))
from graded.basis import truncated_basis
from graded.grading import VariableKind
from graded.superpoly import SuperPolynomial, left_derivative, sum_polynomials
from cohomology.exact_linear import PolynomialSystem, combine
from gauge.forms import GradedOperator
from gauge.system import GaugeSystemSpec, MasterFunction, NoSolutionAtBound

logger = logging.getLogger(__name__)


def koszul_tate_delta(F: SuperPolynomial, spec: GaugeSystemSpec) -> SuperPolynomial:
    """delta = T^a d/d(eta^a) + R_alpha d/d(c*_alpha), coefficients on the left."""
    F = spec.to_N(F)
    pieces = []
    for a, constraint in enumerate(spec.constraints):
        derivative = left_derivative(F, f"eta{a + 1}")
        if derivative:
            pieces.append(spec.to_N(constraint) * derivative)
    for alpha, generator in enumerate(spec.generators):
        derivative = left_derivative(F, f"cs{alpha + 1}")
        if derivative:
            pieces.append(spec.to_N(generator) * derivative)
    return sum_polynomials(F.chart, pieces)


@dataclass
class MasterCheck:
    residual: SuperPolynomial
    components: Dict[Tuple[int, int], SuperPolynomial] = field(default_factory=dict)
    relations: Dict[str, SuperPolynomial] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.residual

    def residual_table(self) -> pd.DataFrame:
        rows = [{'deg': deg, 'res': res, 'terms': len(poly), 'residual': poly.to_text()}
                for (deg, res), poly in sorted(self.components.items())]
        return pd.DataFrame(rows, columns=['deg', 'res', 'terms', 'residual'])


RELATION_NAMES = ('(Q,Q)', '(Q,Pi)', '(Pi,Pi)+2(Q,Xi)')


def check_master(S: MasterFunction, spec: GaugeSystemSpec) -> MasterCheck:
    """(S,S) with its (Deg, res) breakdown and the three lowest-degree relations."""
    value = spec.to_N(S.value)
    residual = spec.bracket(value, value)
    components = {}
    for deg, by_deg in residual.components('deg').items():
        for res, poly in by_deg.components('res').items():
            components[(deg, res)] = poly
    Q, Pi, Xi = (value.component('deg', d) for d in (1, 2, 3))
    relations = {
        RELATION_NAMES[0]: spec.bracket(Q, Q),
        RELATION_NAMES[1]: spec.bracket(Q, Pi),
        RELATION_NAMES[2]: spec.bracket(Pi, Pi) + spec.bracket(Q, Xi).scale(2),
    }
    if residual:
        logger.info(f"Master equation residual has {len(residual)} terms")
    return MasterCheck(residual, components, relations)


def fiber_names(spec: GaugeSystemSpec) -> List[str]:
    return [v.name for v in spec.extended_chart.variables if v.kind is not VariableKind.BASE]


def unknown_basis(spec: GaugeSystemSpec, ghost: int, parity: int, res: int, degrees: Iterable[int],
                  coeff_degree_bound: int) -> List[SuperPolynomial]:
    """Monomials of fixed ghost, parity and resolution degree, ordered by base degree."""
    chart = spec.extended_chart
    basis = []
    for deg in sorted(set(degrees)):
        if deg < 1:
            continue
        basis += truncated_basis(chart, fiber_names(spec),
                                 {'ghost': ghost, 'parity': parity, 'res': res, 'deg': deg},
                                 coeff_degree_bound, even_cap=res + ghost + 2)
    return sorted(basis, key=lambda b: (b.base_degree(), b.items()[0][0]))


def _solve_delta(spec: GaugeSystemSpec, basis: List[SuperPolynomial],
                 target: SuperPolynomial) -> Optional[SuperPolynomial]:
    weights = PolynomialSystem([koszul_tate_delta(b, spec) for b in basis]).solve(target)
    if weights is None:
        return None
    return combine(spec.extended_chart, basis, weights)


def _kernel_correction(spec: GaugeSystemSpec, basis: List[SuperPolynomial], linear_part, target: SuperPolynomial,
                       coeff_degree_bound: int) -> SuperPolynomial:
    """
    Smallest-degree K in ker(delta) with linear_part(K) = target, or zero.

    The kernel is searched on bases of growing coefficient degree.
    """
    chart = spec.extended_chart
    if not target or not basis:
        return SuperPolynomial.zero(chart)
    images = [koszul_tate_delta(b, spec) for b in basis]
    for degree in range(coeff_degree_bound + 1):
        size = sum(1 for b in basis if b.base_degree() <= degree)
        if size == 0:
            continue
        kernel = [combine(chart, basis[:size], v) for v in PolynomialSystem(images[:size]).kernel()]
        if not kernel:
            continue
        weights = PolynomialSystem([linear_part(K) for K in kernel]).solve(target)
        if weights is not None:
            logger.debug(f"Kernel correction found at coefficient degree {degree}")
            return combine(chart, kernel, weights)
    return SuperPolynomial.zero(chart)


def complete_master(S0: MasterFunction, spec: GaugeSystemSpec, max_res: int, coeff_degree_bound: int,
                    progress: bool = False) -> MasterFunction:
    """Add corrections of resolution degree 1..max_res until (S,S) = 0."""
    if max_res < 0 or coeff_degree_bound < 0:
        raise ValueError("Bounds must be non-negative")
    S = spec.to_N(S0.value)
    steps: List[SuperPolynomial] = []
    for k in tqdm(range(1, max_res + 1), desc='master', disable=not progress, file=sys.stderr):
        residual = spec.bracket(S, S)
        if not residual:
            break
        rho = residual.component('res', k - 1)
        lower = residual.filter(lambda key: residual.monomial_grading(key).resolution_degree < k - 1)
        if lower:
            raise NoSolutionAtBound(f"Residual below resolution degree {k - 1} survived", lower, k)
        correction = SuperPolynomial.zero(S.chart)
        if rho:
            basis = unknown_basis(spec, 2, 0, k, rho.grading_values('deg'), coeff_degree_bound)
            correction = _solve_delta(spec, basis, rho.scale(Fraction(-1, 2)))
            if correction is None:
                raise NoSolutionAtBound(f"delta S_{k} = -rho/2 has no solution at coefficient degree "
                                        f"{coeff_degree_bound}", rho, k)
        trial = S + correction
        target = -spec.bracket(trial, trial).component('res', k)
        if target:
            top = max(target.grading_values('deg'))
            basis = unknown_basis(spec, 2, 0, k, range(1, top + 1), coeff_degree_bound)
            correction = correction + _kernel_correction(
                spec, basis, lambda K: spec.bracket(trial, K).scale(2).component('res', k), target,
                coeff_degree_bound)
        logger.info(f"Step {k}: correction with {len(correction)} terms")
        steps.append(correction)
        S = S + correction
    verified = not spec.bracket(S, S)
    if verified:
        logger.info("Master equation holds exactly")
    else:
        logger.warning(f"Master equation not closed at resolution cap {max_res}")
    return MasterFunction(S, coeff_degree_bound if verified else None, verified, steps)


def complete_dynamics(V0: SuperPolynomial, S: MasterFunction, spec: GaugeSystemSpec, max_res: int,
                      coeff_degree_bound: int, progress: bool = False) -> SuperPolynomial:
    """Extend V0 by terms of positive resolution degree so that (S, V) = 0."""
    value = spec.to_N(S.value)
    V = spec.to_N(V0)
    if not V:
        return V
    for k in tqdm(range(1, max_res + 1), desc='dynamics', disable=not progress, file=sys.stderr):
        residual = spec.bracket(value, V)
        if not residual:
            break
        rho = residual.component('res', k - 1)
        correction = SuperPolynomial.zero(V.chart)
        if rho:
            basis = unknown_basis(spec, 1, 1, k, rho.grading_values('deg'), coeff_degree_bound)
            correction = _solve_delta(spec, basis, -rho)
            if correction is None:
                raise NoSolutionAtBound(f"delta V_{k} = -rho has no solution at coefficient degree "
                                        f"{coeff_degree_bound}", rho, k)
        trial = V + correction
        target = -spec.bracket(value, trial).component('res', k)
        if target:
            top = max(target.grading_values('deg'))
            basis = unknown_basis(spec, 1, 1, k, range(1, top + 1), coeff_degree_bound)
            correction = correction + _kernel_correction(
                spec, basis, lambda K: spec.bracket(value, K).component('res', k), target, coeff_degree_bound)
        V = V + correction
    residual = spec.bracket(value, V)
    if residual:
        raise NoSolutionAtBound(f"(S,V) does not vanish at resolution cap {max_res}", residual, max_res)
    return V


def delta_operator(spec: GaugeSystemSpec) -> GradedOperator:
    """The Koszul-Tate differential as a graded operator for matrix and cohomology queries."""
    growth = max([p.base_degree() for p in spec.constraints + spec.generators], default=0)
    return GradedOperator('delta', spec.extended_chart, lambda F: koszul_tate_delta(F, spec), 'deg',
                          ghost_shift=1, growth=growth)
