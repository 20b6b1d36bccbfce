"""
Ideal membership in J = <T^a, R_alpha> and projectibility of multivector fields.

Membership is decided by bounded-degree exact linear algebra; a failed
solve is `inconclusive` unless a disproof applies.
"""
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

sys.path.append(str(Path(__file__).parent.parent))
from graded.basis import truncated_basis
from graded.grading import VariableKind
from graded.superpoly import SuperPolynomial, grading_of, restrict_to_M
from brackets.bracket_engine import non_multivector_variables, schouten
from cohomology.exact_linear import PolynomialSystem, combine
from gauge.system import GaugeSystemError, GaugeSystemSpec, MasterFunction, MembershipCertificate
from gauge.master_solver import fiber_names

logger = logging.getLogger(__name__)

PASS = 'pass'
FAIL = 'fail'
INCONCLUSIVE = 'inconclusive'


def aggregate_verdict(verdicts: List[str]) -> str:
    if any(v == FAIL for v in verdicts):
        return FAIL
    if any(v == INCONCLUSIVE for v in verdicts):
        return INCONCLUSIVE
    return PASS


def _momentum_names(spec: GaugeSystemSpec) -> List[str]:
    return [v.name for v in spec.multivector_chart.of_kind(VariableKind.MOMENTUM)]


def _multivector_basis(spec: GaugeSystemSpec, degree: int, bound: int) -> List[SuperPolynomial]:
    if degree < 0:
        return []
    return truncated_basis(spec.multivector_chart, _momentum_names(spec), {'deg': degree}, bound)


def _disproof(U: SuperPolynomial, spec: GaugeSystemSpec) -> Optional[str]:
    """With no constraints, U * R_1 ... R_m != 0 rules out membership."""
    if spec.constraints:
        return None
    product = U
    for generator in spec.generators:
        product = product * generator
    if product:
        return "U times the product of all generators is nonzero"
    return None


def ideal_membership(U: SuperPolynomial, spec: GaugeSystemSpec, degree_bound: int) -> MembershipCertificate:
    """Solve U = sum A_a T^a + sum B^alpha R_alpha with witnesses of coefficient degree <= degree_bound."""
    U = spec.to_M(U)
    chart = spec.multivector_chart
    bad = non_multivector_variables(U)
    if bad:
        raise GaugeSystemError(f"Ideal membership expects a multivector, found {', '.join(bad)}")
    n_a, n_b = len(spec.constraints), len(spec.generators)
    if not U:
        return MembershipCertificate(PASS, degree_bound, [SuperPolynomial.zero(chart)] * n_a,
                                     [SuperPolynomial.zero(chart)] * n_b, U)
    unknowns: List[Tuple[str, int, SuperPolynomial]] = []
    for degree in sorted(U.grading_values('deg')):
        for a in range(n_a):
            unknowns += [('A', a, b) for b in _multivector_basis(spec, degree, degree_bound)]
        for alpha in range(n_b):
            unknowns += [('B', alpha, b) for b in _multivector_basis(spec, degree - 1, degree_bound)]
    images = [b * (spec.constraints[i] if kind == 'A' else spec.generators[i]) for kind, i, b in unknowns]
    weights = PolynomialSystem(images).solve(U) if unknowns else None
    if weights is None:
        reason = _disproof(U, spec)
        verdict = FAIL if reason else INCONCLUSIVE
        logger.debug(f"Membership of {U.to_text()}: {verdict}")
        return MembershipCertificate(verdict, degree_bound, target=U, reason=reason or 'no witnesses at bound')
    A = [SuperPolynomial.zero(chart) for _ in range(n_a)]
    B = [SuperPolynomial.zero(chart) for _ in range(n_b)]
    for col, weight in weights.items():
        kind, i, basis = unknowns[col]
        if kind == 'A':
            A[i] = A[i] + basis.scale(weight)
        else:
            B[i] = B[i] + basis.scale(weight)
    certificate = MembershipCertificate(PASS, degree_bound, A, B, U)
    if certificate.reconstruct(spec) != U:
        raise GaugeSystemError("Membership witnesses do not reproduce the input")
    return certificate


@dataclass
class ProjectibilityReport:
    verdict: str
    brackets: Dict[str, SuperPolynomial] = field(default_factory=dict)
    certificates: Dict[str, MembershipCertificate] = field(default_factory=dict)
    cocycle_verdict: Optional[str] = None
    extension: Optional[SuperPolynomial] = None


def check_projectible(U: SuperPolynomial, spec: GaugeSystemSpec, degree_bound: int,
                      S: Optional[MasterFunction] = None, max_res: int = 2) -> ProjectibilityReport:
    """[[U, T^a]] and [[U, R_alpha]] must lie in J; with S given, also the cocycle route."""
    U = spec.to_M(U)
    brackets: Dict[str, SuperPolynomial] = {}
    for a, constraint in enumerate(spec.constraints):
        brackets[spec.constraint_names[a] if a < len(spec.constraint_names) else f"T{a + 1}"] = schouten(U, constraint)
    for alpha, generator in enumerate(spec.generators):
        brackets[spec.generator_names[alpha] if alpha < len(spec.generator_names) else f"R{alpha + 1}"] = \
            schouten(U, generator)
    certificates = {name: ideal_membership(value, spec, degree_bound) for name, value in brackets.items()}
    report = ProjectibilityReport(aggregate_verdict([c.verdict for c in certificates.values()]),
                                  brackets, certificates)
    if S is not None:
        extension = extend_multivector(U, S, spec, max_res, degree_bound)
        report.extension = extension
        report.cocycle_verdict = PASS if extension is not None else INCONCLUSIVE
    return report


def extend_multivector(U: SuperPolynomial, S: MasterFunction, spec: GaugeSystemSpec, max_res: int,
                       coeff_degree_bound: int) -> Optional[SuperPolynomial]:
    """
    U + X with X of resolution degree 1..max_res such that (S^1, U + X) = 0,
    S^1 being the momentum-degree-one part of S. None when no X exists at the bound.
    """
    U_N = spec.to_N(U)
    if not U_N:
        return U_N
    S1 = spec.to_N(S.value).component('deg', 1)
    target = -spec.bracket(S1, U_N)
    if not target:
        return U_N
    chart = spec.extended_chart
    ghost, parity = grading_of(U_N, 'ghost'), grading_of(U_N, 'parity')
    basis = []
    for deg in sorted(U_N.grading_values('deg')):
        for res in range(1, max_res + 1):
            basis += truncated_basis(chart, fiber_names(spec),
                                     {'ghost': ghost, 'parity': parity, 'deg': deg, 'res': res},
                                     coeff_degree_bound, even_cap=res + 2)
    weights = PolynomialSystem([spec.bracket(S1, b) for b in basis]).solve(target) if basis else None
    if weights is None:
        return None
    return U_N + combine(chart, basis, weights)


def check_weak_jacobi(spec: GaugeSystemSpec, degree_bound: int) -> Tuple[SuperPolynomial, MembershipCertificate]:
    """[[P,P]] and its membership certificate in J."""
    if spec.bivector is None:
        zero = SuperPolynomial.zero(spec.multivector_chart)
        return zero, ideal_membership(zero, spec, degree_bound)
    value = schouten(spec.bivector, spec.bivector)
    return value, ideal_membership(value, spec, degree_bound)


def check_weak_poisson_vector(spec: GaugeSystemSpec, degree_bound: int,
                              V: Optional[SuperPolynomial] = None) -> Tuple[SuperPolynomial, MembershipCertificate]:
    """[[V,P]] and its membership certificate in J."""
    V = V if V is not None else spec.dynamics
    chart = spec.multivector_chart
    if V is None or spec.bivector is None:
        zero = SuperPolynomial.zero(chart)
        return zero, ideal_membership(zero, spec, degree_bound)
    value = schouten(spec.to_M(V), spec.bivector)
    return value, ideal_membership(value, spec, degree_bound)


def time_evolution(V: SuperPolynomial, F: SuperPolynomial, spec: GaugeSystemSpec) -> SuperPolynomial:
    """(V, F) restricted to M: the flow of V on the observable F."""
    return restrict_to_M(spec.bracket(V, F))


def observable_invariance(V: SuperPolynomial, F: SuperPolynomial, spec: GaugeSystemSpec) -> bool:
    return not time_evolution(V, F, spec)
