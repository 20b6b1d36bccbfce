"""
Exact rational linear algebra on sparse matrices (sympy DomainMatrix over QQ).

Matrices are passed around as dict-of-dicts {row: {col: Fraction}}; columns
usually index unknown coefficients and rows index monomials.
"""
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

sys.path.append(str(Path(__file__).parent.parent))
from graded.superpoly import SuperPolynomial

logger = logging.getLogger(__name__)

SparseRows = Dict[int, Dict[int, Fraction]]


def _to_qq(value: Fraction):
    return QQ(value.numerator, value.denominator)


def _from_qq(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


def to_domain_matrix(rows: SparseRows, shape: Tuple[int, int]) -> DomainMatrix:
    data = {r: {c: _to_qq(v) for c, v in cols.items() if v != 0} for r, cols in rows.items()}
    data = {r: cols for r, cols in data.items() if cols}
    return DomainMatrix(data, shape, QQ)


def from_domain_matrix(matrix: DomainMatrix) -> SparseRows:
    rows: SparseRows = {}
    for r, cols in matrix.to_sparse().rep.items():
        converted = {c: _from_qq(v) for c, v in cols.items() if v}
        if converted:
            rows[r] = converted
    return rows


def rref(rows: SparseRows, shape: Tuple[int, int]) -> Tuple[SparseRows, Tuple[int, ...]]:
    """Reduced row echelon form and pivot columns."""
    m, n = shape
    if m == 0 or n == 0 or not rows:
        return {}, ()
    reduced, pivots = to_domain_matrix(rows, shape).rref()
    return from_domain_matrix(reduced), tuple(pivots)


def rank(rows: SparseRows, shape: Tuple[int, int]) -> int:
    return len(rref(rows, shape)[1])


def nullspace(rows: SparseRows, shape: Tuple[int, int]) -> List[Dict[int, Fraction]]:
    """Basis of the kernel, one vector per free column."""
    _, n = shape
    reduced, pivots = rref(rows, shape)
    pivot_set = set(pivots)
    basis = []
    for free in range(n):
        if free in pivot_set:
            continue
        vector = {free: Fraction(1)}
        for r, pivot in enumerate(pivots):
            value = reduced.get(r, {}).get(free)
            if value:
                vector[pivot] = -value
        basis.append(vector)
    return basis


def solve(rows: SparseRows, shape: Tuple[int, int], rhs: Dict[int, Fraction]) -> Optional[Dict[int, Fraction]]:
    """A particular solution of A x = b with free unknowns set to zero, or None."""
    m, n = shape
    augmented = {r: dict(cols) for r, cols in rows.items()}
    for r, value in rhs.items():
        if value:
            augmented.setdefault(r, {})[n] = value
    reduced, pivots = rref(augmented, (m, n + 1))
    if n in pivots:
        return None
    return {pivot: reduced[r][n] for r, pivot in enumerate(pivots) if reduced.get(r, {}).get(n)}


class PolynomialSystem:
    """
    Linear system whose unknowns multiply given polynomial images.

    Rows are indexed by the monomials that occur in the images or the target.
    """

    def __init__(self, images: Sequence[SuperPolynomial]):
        self.images = list(images)
        self.row_index: Dict[Hashable, int] = {}
        self.rows: SparseRows = {}
        for col, image in enumerate(self.images):
            for key, value in image.terms.items():
                self.rows.setdefault(self._row(key), {})[col] = value

    def _row(self, key) -> int:
        if key not in self.row_index:
            self.row_index[key] = len(self.row_index)
        return self.row_index[key]

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.row_index), len(self.images)

    def rank(self) -> int:
        return rank(self.rows, self.shape)

    def kernel(self) -> List[Dict[int, Fraction]]:
        return nullspace(self.rows, self.shape)

    def solve(self, target: SuperPolynomial) -> Optional[Dict[int, Fraction]]:
        for key in target.terms:
            if key not in self.row_index:
                # a target monomial no image reaches
                return None
        rhs = {self.row_index[key]: value for key, value in target.terms.items()}
        logger.debug(f"Solving {self.shape[0]}x{self.shape[1]} system")
        return solve(self.rows, self.shape, rhs)


def combine(chart, basis: Sequence[SuperPolynomial], weights: Dict[int, Fraction]) -> SuperPolynomial:
    result = SuperPolynomial.zero(chart)
    for col, weight in sorted(weights.items()):
        if weight:
            result = result + basis[col].scale(weight)
    return result
