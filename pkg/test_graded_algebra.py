"""
Tests for graded charts, super-polynomial arithmetic, sampling and monomial bases.

Run with pytest, or directly: python test_graded_algebra.py
"""
from fractions import Fraction

import pytest
from tqdm import tqdm

from graded.grading import (
    ANTIGHOST_GRADING, BASE_MOMENTUM_GRADING, ChartError, ChartLevel, GHOST_GRADING, Grading, GradingError,
    VariableKind, build_extended_chart, build_multivector_chart, build_tangent_chart, grading_field,
)
from graded.superpoly import (
    SuperPolynomial, embed, grading_of, left_derivative, multiply_keys, normalize, restrict_to_L, restrict_to_M,
    right_derivative, substitute,
)
from graded.superpoly import ParityError
from graded.sampling import make_rng, random_coefficient, random_homogeneous, random_samples
from graded.basis import base_keys, fiber_keys, truncated_basis

M2 = build_multivector_chart(['x', 'y'])
N2 = build_extended_chart(['x', 'y'], 1, 1)
T2 = build_tangent_chart(N2)


def var(chart, name):
    return SuperPolynomial.variable(chart, name)


def rounds(count, desc):
    return tqdm(range(count), desc=desc, leave=False, disable=None)


def test_chart_layout():
    assert M2.names == ['x', 'y', 'xs1', 'xs2']
    assert N2.names == ['x', 'y', 'eta1', 'c1', 'xs1', 'xs2', 'etas1', 'cs1']
    assert T2.names[len(N2):] == ['d' + name for name in N2.names]
    assert N2.variable('eta1').grading == ANTIGHOST_GRADING
    assert N2.variable('c1').grading == GHOST_GRADING
    assert N2.variable('xs1').grading == BASE_MOMENTUM_GRADING
    assert N2.momentum_of('c1').name == 'cs1'
    assert T2.velocity_of('xs1').kind is VariableKind.VELOCITY_MOMENTUM
    assert T2.level is ChartLevel.PITN


def test_velocity_gradings_flip_parity_and_lower_ghost():
    dx = T2.variable('dx').grading
    dc = T2.variable('dc1').grading
    assert (dx.parity, dx.ghost, dx.form_degree) == (1, -1, 1)
    assert (dc.parity, dc.ghost) == (0, 0)
    assert dx.momentum_degree is None and dx.resolution_degree is None


def test_chart_equality_and_errors():
    assert build_extended_chart(['x', 'y'], 1, 1) == N2
    assert hash(build_extended_chart(['x', 'y'], 1, 1)) == hash(N2)
    with pytest.raises(ChartError):
        build_multivector_chart(['x', 'x'])
    with pytest.raises(ChartError):
        N2.index('nope')
    with pytest.raises(GradingError):
        grading_field('weight')


def test_grading_arithmetic():
    total = GHOST_GRADING + BASE_MOMENTUM_GRADING
    assert total == Grading(0, 2, 1, 0)
    assert ANTIGHOST_GRADING.scaled(2).parity == 0
    assert GHOST_GRADING.value('gh') == 1


def test_odd_variables_anticommute():
    xs1, xs2 = var(M2, 'xs1'), var(M2, 'xs2')
    assert xs1 * xs2 == -(xs2 * xs1)
    assert not xs1 * xs1
    x = var(M2, 'x')
    assert x * xs1 == xs1 * x
    assert multiply_keys(M2.odd, ((2, 1),), ((2, 1),)) == (0, None)


def test_canonical_text():
    poly = normalize(M2, [(2, ['x', 'x']), (Fraction(-1, 2), ['y', 'xs1'])])
    assert poly.to_text() == '2*x^2 - 1/2*y*xs1'
    assert SuperPolynomial.zero(M2).to_text() == '0'
    assert normalize(M2, [(1, ['xs2', 'xs1'])]).to_text() == '-xs1*xs2'


def random_raw_terms(rng, chart, count):
    """Unnormalized terms: repeated names, odd factors out of order, explicit exponents."""
    names = chart.names
    terms = []
    for _ in range(count):
        factors = [str(rng.choice(names)) for _ in range(int(rng.integers(0, 5)))]
        if rng.random() < 0.3:
            factors.append((str(rng.choice(names)), int(rng.integers(1, 3))))
        terms.append((random_coefficient(rng), factors))
    return terms


def test_normalize_is_idempotent():
    rng = make_rng(3)
    for _ in rounds(1000, "normalize"):
        once = normalize(N2, random_raw_terms(rng, N2, int(rng.integers(1, 5))))
        assert normalize(N2, once.monomials()) == once
        u, v = random_samples(N2, rng, 2, target={'parity': 1}, n_terms=2, max_degree=2)
        assert not u * v + v * u


def test_arithmetic_identities():
    rng = make_rng(1)
    for _ in rounds(1000, "arithmetic"):
        a, b, c = random_samples(N2, rng, 3, n_terms=3, max_degree=2)
        assert (a + b) * c == a * c + b * c
        assert (a * b) * c == a * (b * c)
        assert a - a == 0
        # graded commutativity
        sign = -1 if a.parity() and b.parity() else 1
        assert a * b == (b * a).scale(sign)


def test_left_and_right_derivatives():
    xs1, xs2, x = var(M2, 'xs1'), var(M2, 'xs2'), var(M2, 'x')
    F = x * xs1 * xs2
    assert left_derivative(F, 'xs2') == -(x * xs1)
    assert right_derivative(F, 'xs2') == x * xs1
    assert left_derivative(F, 'xs1') == x * xs2
    assert right_derivative(F, 'xs1') == -(x * xs2)
    assert left_derivative(x ** 3, 'x') == (x ** 2).scale(3)


def test_derivative_leibniz_rule():
    rng = make_rng(2)
    for _ in rounds(1000, "derivative leibniz"):
        F, G = random_samples(N2, rng, 2, n_terms=3, max_degree=2)
        for name in ('x', 'eta1', 'xs2'):
            v = N2.variable(name)
            sign = -1 if v.is_odd and F.parity() else 1
            expected = left_derivative(F, name) * G + (F * left_derivative(G, name)).scale(sign)
            assert left_derivative(F * G, name) == expected


def test_substitute_checks_parity():
    x, xs1 = var(M2, 'x'), var(M2, 'xs1')
    assert substitute(x * x, {'x': var(M2, 'y') + 1}) == (var(M2, 'y') + 1) ** 2
    with pytest.raises(ParityError):
        substitute(x, {'x': xs1})


def test_restrictions_and_embedding():
    F = var(N2, 'x') + var(N2, 'xs1') * var(N2, 'c1') + var(N2, 'etas1')
    assert restrict_to_M(F) == var(N2, 'x')
    G = embed(var(N2, 'xs1') * var(N2, 'eta1'), T2)
    assert G == -(var(T2, 'eta1') * var(T2, 'xs1'))
    dF = var(T2, 'dx') * var(T2, 'dxs1') + var(T2, 'y')
    assert restrict_to_L(dF) == var(T2, 'y')
    moved = embed(var(M2, 'xs2') * var(M2, 'xs1'), N2)
    assert moved == -(var(N2, 'xs1') * var(N2, 'xs2'))
    with pytest.raises(ChartError):
        embed(var(N2, 'c1'), M2)


def test_grading_of_and_components():
    S = var(N2, 'c1') * var(N2, 'xs1') + var(N2, 'xs1') * var(N2, 'xs2')
    assert grading_of(S, 'gh') == 2
    assert grading_of(S, 'parity') == 0
    assert set(S.components('res')) == {0}
    with pytest.raises(GradingError):
        grading_of(SuperPolynomial.zero(N2), 'gh')
    with pytest.raises(GradingError):
        grading_of(var(N2, 'x') + var(N2, 'xs1'), 'deg')
    with pytest.raises(GradingError):
        grading_of(var(T2, 'dx'), 'deg')


def test_random_homogeneous_respects_targets():
    rng = make_rng(3)
    for _ in range(30):
        F = random_homogeneous(N2, rng, homogeneous_in=('parity', 'ghost'), target={'ghost': 1}, n_terms=4)
        if F:
            assert grading_of(F, 'ghost') == 1
            F.parity()


def test_bases():
    assert len(base_keys(M2, 2)) == 6
    assert len(base_keys(M2, 2, min_degree=1)) == 5
    keys = fiber_keys(N2, ['eta1', 'c1', 'xs1', 'xs2', 'etas1', 'cs1'], {'ghost': 2, 'parity': 0, 'res': 0})
    for key in keys:
        poly = SuperPolynomial(N2, {key: 1})
        assert grading_of(poly, 'ghost') == 2 and grading_of(poly, 'res') == 0
    basis = truncated_basis(M2, ['xs1', 'xs2'], {'deg': 1}, 1)
    assert sorted(b.to_text() for b in basis) == ['x*xs1', 'x*xs2', 'xs1', 'xs2', 'y*xs1', 'y*xs2']
    assert all(b.base_degree() == 0 for b in basis[:2])


if __name__ == "__main__":
    for name, func in list(globals().items()):
        if name.startswith('test_') and callable(func):
            func()
            print(f"[OK] {name}")
