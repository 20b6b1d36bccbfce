"""
Tests for bracket tables, the odd and even brackets, Schouten brackets and
the derived brackets built from Delta.

Run with pytest, or directly: python test_brackets.py
"""
from fractions import Fraction

import pytest
from tqdm import tqdm

from graded.grading import build_extended_chart, build_multivector_chart, build_tangent_chart
from graded.superpoly import SuperPolynomial, grading_of
from graded.sampling import make_rng, random_samples
from brackets.tables import BracketError, ConnectionData, curvature, even_table, flat_odd_table
from brackets.bracket_engine import (
    RESTRICT_TO_M, delta_derived_bracket, delta_element, derived_bracket, even_bracket, exterior_derivative,
    odd_bracket, schouten,
)

M3 = build_multivector_chart(['x', 'y', 'z'])
N2 = build_extended_chart(['x', 'y'], 1, 1)
N22 = build_extended_chart(['x', 'y'], 1, 2)
T2 = build_tangent_chart(N2)


def var(chart, name):
    return SuperPolynomial.variable(chart, name)


def rounds(count, desc):
    return tqdm(range(count), desc=desc, leave=False, disable=None)


def odd_sign(F, G):
    """(-1)^{(e(F)+1)(e(G)+1)}"""
    return -1 if (F.parity() + 1) * (G.parity() + 1) % 2 else 1


def heisenberg_fields():
    x, y = var(M3, 'x'), var(M3, 'y')
    xs1, xs2, xs3 = var(M3, 'xs1'), var(M3, 'xs2'), var(M3, 'xs3')
    X = xs1 - (y * xs3).scale(Fraction(1, 2))
    Y = xs2 + (x * xs3).scale(Fraction(1, 2))
    return X, Y, xs3


def sample_connection():
    y, x = var(N22, 'y'), var(N22, 'x')
    return ConnectionData.from_mapping({('c1', 'c2', 'x'): y, ('c2', 'c1', 'y'): x, ('eta1', 'eta1', 'x'): x})


def test_fundamental_brackets():
    assert odd_bracket(var(N2, 'xs1'), var(N2, 'x')) == 1
    assert odd_bracket(var(N2, 'x'), var(N2, 'xs1')) == -1
    assert odd_bracket(var(N2, 'cs1'), var(N2, 'c1')) == 1
    assert odd_bracket(var(N2, 'c1'), var(N2, 'cs1')) == -1
    assert not odd_bracket(var(N2, 'xs1'), var(N2, 'y'))
    table = even_table(T2)
    assert table.entry('dxs1', 'x') == 1
    assert table.entry('dx', 'xs1') == -1
    assert len(flat_odd_table(N2)) == 2 * 4


def test_bracket_charts_are_checked():
    with pytest.raises(BracketError):
        even_table(N2)
    with pytest.raises(BracketError):
        flat_odd_table(T2)
    with pytest.raises(BracketError):
        odd_bracket(var(T2, 'x'), var(T2, 'y'))
    with pytest.raises(BracketError):
        even_bracket(var(N2, 'x'), var(N2, 'y'))
    with pytest.raises(BracketError):
        schouten(var(N2, 'c1'), var(N2, 'xs1'))


def test_schouten_heisenberg():
    X, Y, Z = heisenberg_fields()
    assert schouten(X, Y) == Z
    assert schouten(Y, X) == -Z
    P = X * Y
    assert schouten(P, P).to_text() == '2*xs1*xs2*xs3'
    assert not schouten(Z, P)


def test_odd_bracket_antisymmetry_and_ghost():
    rng = make_rng(11)
    for _ in rounds(1000, "odd antisymmetry"):
        F, G = random_samples(N2, rng, 2, homogeneous_in=('parity', 'ghost'), n_terms=3, max_degree=2)
        FG = odd_bracket(F, G)
        assert FG == odd_bracket(G, F).scale(-odd_sign(F, G))
        if FG:
            assert grading_of(FG, 'gh') == grading_of(F, 'gh') + grading_of(G, 'gh') - 1
            assert FG.parity() == (F.parity() + G.parity() + 1) % 2


def test_twisted_bracket_antisymmetry():
    conn = sample_connection()
    rng = make_rng(18)
    for _ in rounds(1000, "twisted antisymmetry"):
        F, G = random_samples(N22, rng, 2, homogeneous_in=('parity', 'ghost'), n_terms=3, max_degree=2)
        assert odd_bracket(F, G, conn) == odd_bracket(G, F, conn).scale(-odd_sign(F, G))


def test_even_bracket_antisymmetry_and_ghost():
    rng = make_rng(19)
    for _ in rounds(1000, "even antisymmetry"):
        F, G = random_samples(T2, rng, 2, homogeneous_in=('parity', 'ghost'), n_terms=3, max_degree=2)
        FG = even_bracket(F, G)
        sign = -1 if F.parity() and G.parity() else 1
        assert FG == even_bracket(G, F).scale(-sign)
        if FG:
            assert grading_of(FG, 'gh') == grading_of(F, 'gh') + grading_of(G, 'gh')


def test_odd_bracket_leibniz():
    rng = make_rng(12)
    for _ in rounds(1000, "odd leibniz"):
        F, G, H = random_samples(N2, rng, 3, n_terms=2, max_degree=2)
        sign = -1 if (F.parity() + 1) * G.parity() % 2 else 1
        assert odd_bracket(F, G * H) == odd_bracket(F, G) * H + (G * odd_bracket(F, H)).scale(sign)


def check_odd_jacobi(chart, conn, seed, count):
    rng = make_rng(seed)
    for _ in rounds(count, "odd jacobi"):
        F, G, H = random_samples(chart, rng, 3, n_terms=2, max_degree=2)
        left = odd_bracket(F, odd_bracket(G, H, conn), conn)
        right = odd_bracket(odd_bracket(F, G, conn), H, conn) + \
            odd_bracket(G, odd_bracket(F, H, conn), conn).scale(odd_sign(F, G))
        assert left == right


def test_odd_bracket_jacobi_flat():
    check_odd_jacobi(N2, None, 13, 100)


def test_odd_bracket_jacobi_with_connection():
    check_odd_jacobi(N22, sample_connection(), 14, 100)


def test_connection_terms():
    conn = sample_connection()
    c1, c2, x, y = var(N22, 'c1'), var(N22, 'c2'), var(N22, 'x'), var(N22, 'y')
    xs1, xs2 = var(N22, 'xs1'), var(N22, 'xs2')
    # (x*_i, c^C) = c^B A^C_{iB}
    assert odd_bracket(xs1, c1, conn) == c2 * y
    assert not odd_bracket(xs1, c2, conn)
    assert odd_bracket(xs2, c2, conn) == c1 * x
    # (x*_i, c*_C) = -A^D_{iC} c*_D
    assert odd_bracket(xs1, var(N22, 'cs2'), conn) == -(y * var(N22, 'cs1'))
    assert odd_bracket(var(N22, 'cs1'), c1, ConnectionData()) == 1
    assert ConnectionData().is_flat_zero()


def test_curvature():
    N1 = build_extended_chart(['x', 'y'], 0, 1)
    conn = ConnectionData.from_mapping({('c1', 'c1', 'x'): var(N1, 'y')})
    assert curvature(conn, N1) == {('c1', 'c1', 'x', 'y'): SuperPolynomial.constant(N1, -1)}
    flat = ConnectionData.from_mapping({('c1', 'c1', 'x'): var(N1, 'x')})
    assert curvature(flat, N1) == {}


def test_even_bracket_jacobi():
    rng = make_rng(15)
    names = ['x', 'y', 'c1', 'xs1', 'dx', 'dxs2', 'dc1', 'dcs1']
    for _ in rounds(100, "even jacobi"):
        F, G, H = random_samples(T2, rng, 3, names=names, n_terms=2, max_degree=2)
        sign = -1 if F.parity() and G.parity() else 1
        left = even_bracket(F, even_bracket(G, H))
        right = even_bracket(even_bracket(F, G), H) + even_bracket(G, even_bracket(F, H)).scale(sign)
        assert left == right
        assert even_bracket(F, G) == even_bracket(G, F).scale(-sign)


def test_delta_is_odd_and_squares_to_zero():
    delta = delta_element(N2)
    assert delta.parity() == 1
    assert not even_bracket(delta, delta)


def test_delta_derived_bracket_sign():
    rng = make_rng(16)
    for _ in rounds(1000, "derived bracket"):
        F, G = random_samples(N2, rng, 2, n_terms=3, max_degree=2)
        expected = odd_bracket(F, G).scale(-1 if F.parity() else 1)
        assert delta_derived_bracket(F, G) == expected


def test_derived_bracket_to_M():
    x, y = var(N2, 'x'), var(N2, 'y')
    generator = var(N2, 'xs1') * var(N2, 'xs2')
    assert not derived_bracket(generator, [x], RESTRICT_TO_M)
    assert derived_bracket(generator, [x, y], RESTRICT_TO_M) == -1
    assert derived_bracket(generator, [y, x], RESTRICT_TO_M) == 1
    with pytest.raises(BracketError):
        derived_bracket(generator, [], RESTRICT_TO_M)
    with pytest.raises(BracketError):
        derived_bracket(generator, [x], 'to-nowhere')


def test_exterior_derivative():
    x, y = var(T2, 'x'), var(T2, 'y')
    dx, dy = var(T2, 'dx'), var(T2, 'dy')
    assert exterior_derivative(x) == dx
    assert exterior_derivative(x * y) == y * dx + x * dy
    assert not exterior_derivative(dx)
    rng = make_rng(17)
    for omega in random_samples(T2, rng, 20, names=['x', 'y', 'dx', 'dy'], n_terms=3, max_degree=3):
        assert not exterior_derivative(exterior_derivative(omega))


if __name__ == "__main__":
    for name, func in list(globals().items()):
        if name.startswith('test_') and callable(func):
            func()
            print(f"[OK] {name}")
