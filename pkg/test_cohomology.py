"""
Tests for exact linear algebra and truncated Q / Q-hat cohomology.

Run with pytest, or directly: python test_cohomology.py
"""
from fractions import Fraction
from functools import lru_cache

import pytest

from graded.superpoly import SuperPolynomial
from cohomology.exact_linear import PolynomialSystem, combine, nullspace, rank, rref, solve
from cohomology.cohomology import (
    NotACocycle, Truncation, TruncationError, bigraded_table, coboundary_preimage, cohomology_at, enumerate_basis,
    is_cocycle, lemma_check, operator_matrix,
)
from gauge.system import assemble_S0
from gauge.master_solver import complete_master, delta_operator
from gauge.forms import GradedOperator, extract_Q, extract_Qhat, lift_master
from dsl.builder import load_system
from fixtures.library import fixture_text


def var(chart, name):
    return SuperPolynomial.variable(chart, name)


@lru_cache(maxsize=None)
def heisenberg():
    spec = load_system(fixture_text('heisenberg')).spec
    S = complete_master(assemble_S0(spec), spec, max_res=3, coeff_degree_bound=3)
    return spec, S


def test_rank_nullspace_rref():
    rows = {0: {0: Fraction(1), 1: Fraction(2)}, 1: {0: Fraction(2), 1: Fraction(4)}}
    assert rank(rows, (2, 2)) == 1
    assert nullspace(rows, (2, 2)) == [{1: Fraction(1), 0: Fraction(-2)}]
    reduced, pivots = rref(rows, (2, 2))
    assert pivots == (0,)
    assert reduced[0] == {0: 1, 1: 2}
    assert rref({}, (0, 0)) == ({}, ())


def test_solve():
    rows = {0: {0: Fraction(1)}, 1: {1: Fraction(1)}}
    assert solve(rows, (2, 2), {0: Fraction(3), 1: Fraction(5)}) == {0: 3, 1: 5}
    inconsistent = {0: {0: Fraction(1)}, 1: {0: Fraction(1)}}
    assert solve(inconsistent, (2, 1), {0: Fraction(1), 1: Fraction(2)}) is None


def test_polynomial_system():
    spec, _ = heisenberg()
    N = spec.extended_chart
    x, y, z = var(N, 'x'), var(N, 'y'), var(N, 'z')
    system = PolynomialSystem([x, x + y, y])
    assert system.shape == (2, 3)
    assert system.rank() == 2
    assert len(system.kernel()) == 1
    weights = system.solve(x.scale(2) + y)
    assert combine(N, system.images, weights) == x.scale(2) + y
    assert system.solve(z) is None


def test_heisenberg_invariant_functions():
    spec, S = heisenberg()
    Q = extract_Q(S, spec)
    report = cohomology_at(Q, Truncation(2, 0, 0))
    # polynomials of degree <= 2 in x and y
    assert report.source_dimension == 10
    assert report.dimension == 6
    assert report.image_dimension == 0
    assert len(report.representatives) == 6
    assert all(is_cocycle(Q, r) for r in report.representatives)


def test_lemma_check():
    spec, S = heisenberg()
    Q = extract_Q(S, spec)
    verdict, report = lemma_check(Q, Truncation(2, 0, 1))
    assert verdict == 'consistent'
    assert report.dimension == 0
    verdict, _ = lemma_check(Q, Truncation(1, 0, 0))
    assert verdict == 'not-applicable'


def test_Q_squares_to_zero_on_basis():
    spec, S = heisenberg()
    Q = extract_Q(S, spec)
    for trunc in (Truncation(1, 0, 1), Truncation(1, 1, 1), Truncation(1, 1, 2)):
        for element in enumerate_basis(Q, trunc):
            assert not Q(Q(element))


def test_operator_matrix():
    spec, S = heisenberg()
    Q = extract_Q(S, spec)
    matrix = operator_matrix(Q, Truncation(1, 0, 0))
    assert matrix.shape[1] == 4
    dense = matrix.to_dense()
    assert len(dense) == matrix.shape[0]
    z_column = [b.to_text() for b in matrix.source].index('z')
    assert matrix.images[z_column]
    assert matrix.apply({z_column: Fraction(1)})


def test_truncation_error():
    spec, _ = heisenberg()
    N = spec.extended_chart
    identity = GradedOperator('identity', N, lambda F: F, 'deg', ghost_shift=1)
    with pytest.raises(TruncationError):
        operator_matrix(identity, Truncation(1, 0, 0))


def test_coboundary_preimage():
    spec, S = heisenberg()
    Q = extract_Q(S, spec)
    N = spec.extended_chart
    target = Q(var(N, 'x') * var(N, 'z'))
    assert target
    G = coboundary_preimage(Q, target, Truncation(2, 1, 0))
    assert G is not None and Q(G) == target
    with pytest.raises(NotACocycle):
        coboundary_preimage(Q, var(N, 'z'), Truncation(2, 0, 0))
    assert not coboundary_preimage(Q, SuperPolynomial.zero(N), Truncation(2, 1, 0))


def test_bigraded_table():
    spec, S = heisenberg()
    table = bigraded_table(extract_Q(S, spec), [0, 1], [0, 1], 1)
    assert list(table.index) == [0, 1] and list(table.columns) == [0, 1]
    assert table.loc[0, 0] == 3
    assert table.loc[0, 1] == 0
    assert table.loc[1, 0] == 0


def test_Qhat_cohomology_on_functions():
    spec, S = heisenberg()
    Qhat = extract_Qhat(lift_master(S, spec))
    report = cohomology_at(Qhat, Truncation(1, 0, 0))
    assert report.source_dimension == 4
    assert report.dimension == 3


def test_koszul_tate_operator():
    spec, _ = heisenberg()
    delta = delta_operator(spec)
    N = spec.extended_chart
    assert delta(var(N, 'cs1')) == var(N, 'xs3')
    assert delta.ghost_shift == 1


if __name__ == "__main__":
    for name, func in list(globals().items()):
        if name.startswith('test_') and callable(func):
            func()
            print(f"[OK] {name}")
