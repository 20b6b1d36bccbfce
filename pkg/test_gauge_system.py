"""
Tests for gauge system data, the Koszul-Tate differential, master function
completion, ideal membership and projectibility.

Run with pytest, or directly: python test_gauge_system.py
"""
import pytest

from graded.grading import GradingError
from graded.superpoly import SuperPolynomial, grading_of
from gauge.system import (
    GaugeSystemSpec, MasterFunction, NoSolutionAtBound, assemble_S0, verify_structure_witnesses,
)
from gauge.master_solver import check_master, complete_dynamics, complete_master, koszul_tate_delta
from gauge.projectibility import (
    FAIL, INCONCLUSIVE, PASS, aggregate_verdict, check_projectible, check_weak_jacobi, check_weak_poisson_vector,
    ideal_membership, observable_invariance, time_evolution,
)
from dsl.builder import load_system
from fixtures.library import fixture_text


def heisenberg():
    return load_system(fixture_text('heisenberg'))


def contact():
    return load_system(fixture_text('contact'))


def var(chart, name):
    return SuperPolynomial.variable(chart, name)


def constrained_spec():
    """Plane with the constraint x = 0 and the gauge generator d/dy."""
    spec = GaugeSystemSpec(['x', 'y'])
    M = spec.multivector_chart
    spec.constraints.append(var(M, 'x'))
    spec.generators.append(var(M, 'xs2'))
    return spec


def test_assemble_S0_heisenberg():
    built = heisenberg()
    spec = built.spec
    S0 = assemble_S0(spec)
    N = spec.extended_chart
    assert S0.value == var(N, 'c1') * var(N, 'xs3') + spec.to_N(spec.bivector)
    assert grading_of(S0.value, 'gh') == 2
    assert set(S0.by_momentum()) == {1, 2}
    assert S0.momentum_part(1) == var(N, 'c1') * var(N, 'xs3')


def test_master_function_gradings():
    spec = constrained_spec()
    N = spec.extended_chart
    with pytest.raises(GradingError):
        MasterFunction(var(N, 'c1')).check_gradings()
    with pytest.raises(GradingError):
        MasterFunction(var(N, 'x')).check_gradings()
    with pytest.raises(GradingError):
        MasterFunction(var(spec.multivector_chart, 'xs1') * var(spec.multivector_chart, 'xs2')).check_gradings()
    MasterFunction(SuperPolynomial.zero(N)).check_gradings()


def test_koszul_tate_delta():
    spec = constrained_spec()
    N = spec.extended_chart
    assert koszul_tate_delta(var(N, 'eta1'), spec) == var(N, 'x')
    assert koszul_tate_delta(var(N, 'cs1'), spec) == var(N, 'xs2')
    assert not koszul_tate_delta(var(N, 'c1') * var(N, 'y'), spec)
    # delta is a derivation that squares to zero
    F = var(N, 'eta1') * var(N, 'cs1')
    assert not koszul_tate_delta(koszul_tate_delta(F, spec), spec)


def test_check_master_reports_jacobiator():
    spec = heisenberg().spec
    report = check_master(assemble_S0(spec), spec)
    assert not report.passed
    assert report.residual.to_text() == '2*xs1*xs2*xs3'
    assert set(report.components) == {(3, 0)}
    table = report.residual_table()
    assert list(table.columns) == ['deg', 'res', 'terms', 'residual']
    assert table.iloc[0]['deg'] == 3
    assert not report.relations['(Q,Q)']
    assert report.relations['(Pi,Pi)+2(Q,Xi)'] == report.residual


def test_complete_master_heisenberg():
    spec = heisenberg().spec
    S = complete_master(assemble_S0(spec), spec, max_res=3, coeff_degree_bound=3)
    assert S.verified
    assert S.verified_degree_bound == 3
    report = check_master(S, spec)
    assert report.passed
    assert all(not value for value in report.relations.values())
    N = spec.extended_chart
    S1 = S.resolution_part(1)
    assert koszul_tate_delta(S1, spec) == -(var(N, 'xs1') * var(N, 'xs2') * var(N, 'xs3'))
    assert S.resolution_part(0) == assemble_S0(spec).value


def test_complete_master_contact():
    spec = contact().spec
    S = complete_master(assemble_S0(spec), spec, max_res=3, coeff_degree_bound=3)
    assert S.verified
    assert check_master(S, spec).passed


def test_complete_master_stops_at_zero_residual():
    spec = constrained_spec()
    S0 = assemble_S0(spec)
    S = complete_master(S0, spec, max_res=2, coeff_degree_bound=1)
    assert S.verified
    assert S.value == S0.value
    assert S.steps == []
    with pytest.raises(ValueError):
        complete_master(S0, spec, max_res=-1, coeff_degree_bound=1)


def test_complete_master_without_solution():
    # [[P,P]] = 2 xs1 xs2 xs3 is not in the ideal once the generator is removed
    built = heisenberg()
    spec = GaugeSystemSpec(['x', 'y', 'z'], bivector=built.spec.bivector)
    with pytest.raises(NoSolutionAtBound) as raised:
        complete_master(assemble_S0(spec), spec, max_res=2, coeff_degree_bound=2)
    assert raised.value.step == 1
    assert raised.value.residual


def test_complete_dynamics_heisenberg():
    built = heisenberg()
    spec = built.spec
    S = complete_master(assemble_S0(spec), spec, max_res=3, coeff_degree_bound=3)
    V = complete_dynamics(spec.dynamics, S, spec, max_res=3, coeff_degree_bound=3)
    assert not spec.bracket(S.value, V)
    assert V.component('res', 0) == spec.to_N(spec.dynamics)


def test_ideal_membership():
    spec = heisenberg().spec
    M = spec.multivector_chart
    xs1, xs3 = var(M, 'xs1'), var(M, 'xs3')
    certificate = ideal_membership(xs3, spec, 2)
    assert certificate.verdict == PASS
    assert certificate.generator_witnesses == [SuperPolynomial.constant(M, 1)]
    assert certificate.reconstruct(spec) == xs3
    product = ideal_membership(xs1 * xs3, spec, 2)
    assert product.is_member and product.reconstruct(spec) == xs1 * xs3
    outside = ideal_membership(xs1, spec, 2)
    assert outside.verdict == FAIL
    assert outside.reason
    assert ideal_membership(SuperPolynomial.zero(M), spec, 0).is_member


def test_ideal_membership_with_constraints():
    spec = constrained_spec()
    M = spec.multivector_chart
    x, y = var(M, 'x'), var(M, 'y')
    certificate = ideal_membership(x * y, spec, 1)
    assert certificate.is_member
    assert certificate.constraint_witnesses == [y]
    # no disproof applies once constraints are present
    assert ideal_membership(y, spec, 2).verdict == INCONCLUSIVE


def test_aggregate_verdict():
    assert aggregate_verdict([PASS, PASS]) == PASS
    assert aggregate_verdict([PASS, INCONCLUSIVE]) == INCONCLUSIVE
    assert aggregate_verdict([INCONCLUSIVE, FAIL]) == FAIL
    assert aggregate_verdict([]) == PASS


def test_projectibility():
    built = heisenberg()
    spec = built.spec
    M = spec.multivector_chart
    assert check_projectible(built.vectors['X'], spec, 2).verdict == PASS
    assert check_projectible(spec.bivector, spec, 2).verdict == PASS
    report = check_projectible(var(M, 'z') * var(M, 'xs1'), spec, 2)
    assert report.verdict == FAIL
    assert report.brackets['Z'] == -var(M, 'xs1')


def test_projectibility_cocycle_route():
    built = heisenberg()
    spec = built.spec
    S = complete_master(assemble_S0(spec), spec, max_res=3, coeff_degree_bound=3)
    report = check_projectible(spec.dynamics, spec, 2, S=S, max_res=2)
    assert report.verdict == PASS
    assert report.cocycle_verdict == PASS
    assert report.extension is not None


def test_weak_jacobi_and_poisson_vector():
    spec = heisenberg().spec
    value, certificate = check_weak_jacobi(spec, 3)
    assert value.to_text() == '2*xs1*xs2*xs3'
    assert certificate.is_member
    value, certificate = check_weak_poisson_vector(spec, 3)
    assert certificate.is_member


def test_time_evolution():
    built = heisenberg()
    spec = built.spec
    N = spec.extended_chart
    V = spec.to_N(spec.dynamics)
    assert time_evolution(V, var(N, 'x'), spec) == var(N, 'y')
    assert time_evolution(V, var(N, 'y'), spec) == -var(N, 'x')
    r2 = var(N, 'x') * var(N, 'x') + var(N, 'y') * var(N, 'y')
    assert observable_invariance(V, r2, spec)
    assert not observable_invariance(V, var(N, 'x'), spec)


def test_structure_witnesses_triangular():
    spec = load_system(fixture_text('triangular-3')).spec
    assert spec.generator_names == ['R12', 'R13', 'R23']
    residuals = verify_structure_witnesses(spec)
    assert set(residuals) == {(0, 2)}
    assert all(not r for r in residuals.values())
    spec.structure_witnesses.f[(0, 2)][1] = SuperPolynomial.constant(spec.multivector_chart, 2)
    assert verify_structure_witnesses(spec)[(0, 2)] == -spec.generators[1]


if __name__ == "__main__":
    for name, func in list(globals().items()):
        if name.startswith('test_') and callable(func):
            func()
            print(f"[OK] {name}")
