"""
Truncated cohomology of Q (on functions of the extended chart) and Q-hat
(on forms over L) by exact rank computations.

A truncation fixes the ghost number l, the momentum or form degree k, a bound
on the base-coordinate degree and optionally a resolution cap. Coboundaries
are counted inside the truncated space:
    dim im = rank(I) + dim(E) - rank(I + E)
with I the images of the previous ghost degree and E the truncated basis.
"""
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd
from tqdm import tqdm

sys.path.append(str(Path(__file__).parent.parent))
from gsys_utils import GsysError
from graded.basis import truncated_basis
from graded.grading import ChartLevel, VariableKind
from graded.superpoly import Key, SuperPolynomial
from cohomology.exact_linear import PolynomialSystem, SparseRows, combine, nullspace, rank
from gauge.forms import GradedOperator

logger = logging.getLogger(__name__)


class TruncationError(GsysError):
    """An operator image left the target truncation."""


class NotACocycle(GsysError):
    """A coboundary preimage was requested for an element that is not closed."""


@dataclass(frozen=True)
class Truncation:
    base_poly_degree: int
    ghost_degree: int
    degree: int
    res_cap: Optional[int] = None

    def shifted(self, ghost_shift: int, base_poly_degree: Optional[int] = None) -> 'Truncation':
        return Truncation(self.base_poly_degree if base_poly_degree is None else base_poly_degree,
                          self.ghost_degree + ghost_shift, self.degree, self.res_cap)


def _fiber_names(operator: GradedOperator) -> List[str]:
    chart = operator.chart
    if chart.level is ChartLevel.PITN:
        # forms live on L: no momenta, no velocity-momenta
        excluded = (VariableKind.BASE, VariableKind.MOMENTUM, VariableKind.VELOCITY_MOMENTUM)
    else:
        excluded = (VariableKind.BASE,)
    return [v.name for v in chart.variables if v.kind not in excluded]


def enumerate_basis(operator: GradedOperator, trunc: Truncation) -> List[SuperPolynomial]:
    """Deterministic basis of the truncated space: by base degree, then canonical key."""
    targets = {'ghost': trunc.ghost_degree, operator.degree_field: trunc.degree}
    upper = {'res': trunc.res_cap} if trunc.res_cap is not None and operator.degree_field == 'deg' else None
    even_cap = max(trunc.degree, 0) + abs(trunc.ghost_degree) + 2
    return truncated_basis(operator.chart, _fiber_names(operator), targets, trunc.base_poly_degree,
                           upper=upper, even_cap=even_cap)


@dataclass
class OperatorMatrix:
    rows: SparseRows
    shape: Tuple[int, int]
    source: List[SuperPolynomial]
    row_keys: List[Key]
    images: List[SuperPolynomial]

    def apply(self, weights: Dict[int, Fraction]) -> Dict[int, Fraction]:
        result: Dict[int, Fraction] = {}
        for r, cols in self.rows.items():
            value = sum((cols[c] * w for c, w in weights.items() if c in cols), Fraction(0))
            if value:
                result[r] = value
        return result

    def to_dense(self) -> List[List[Fraction]]:
        m, n = self.shape
        return [[self.rows.get(r, {}).get(c, Fraction(0)) for c in range(n)] for r in range(m)]


def operator_matrix(operator: GradedOperator, trunc: Truncation, progress: bool = False) -> OperatorMatrix:
    """Matrix of the operator on the truncated basis; rows index the image monomials."""
    source = enumerate_basis(operator, trunc)
    target_degree = trunc.base_poly_degree + operator.growth
    target_ghost = trunc.ghost_degree + operator.ghost_shift
    images = []
    for element in tqdm(source, desc=f"{operator.name} matrix", disable=not progress, file=sys.stderr):
        image = operator(element)
        for key in image.terms:
            grading = image.monomial_grading(key)
            base_degree = sum(e for i, e in key if image.chart.base_mask[i])
            if grading.ghost != target_ghost or base_degree > target_degree:
                raise TruncationError(f"{operator.name}({element.to_text()}) leaves the target truncation "
                                      f"at monomial {image.filter(lambda k: k == key).to_text()}")
        images.append(image)
    system = PolynomialSystem(images)
    row_keys = [None] * len(system.row_index)
    for key, r in system.row_index.items():
        row_keys[r] = key
    logger.debug(f"{operator.name} matrix {system.shape[0]}x{system.shape[1]} at {trunc}")
    return OperatorMatrix(system.rows, system.shape, source, row_keys, images)


@dataclass
class CohomologyReport:
    truncation: Truncation
    operator: str
    source_dimension: int
    kernel_dimension: int
    image_dimension: int
    representatives: List[SuperPolynomial] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return self.kernel_dimension - self.image_dimension

    @property
    def rank(self) -> int:
        return self.source_dimension - self.kernel_dimension


def _span_rank(polys: Sequence[SuperPolynomial]) -> int:
    return PolynomialSystem(list(polys)).rank() if polys else 0


def cohomology_at(operator: GradedOperator, trunc: Truncation, progress: bool = False) -> CohomologyReport:
    """dim H = dim ker - dim(coboundaries inside the truncated space)."""
    outgoing = operator_matrix(operator, trunc, progress)
    source = outgoing.source
    kernel_vectors = nullspace(outgoing.rows, outgoing.shape)
    kernel = [combine(operator.chart, source, v) for v in kernel_vectors]
    # previous ghost degree, one base degree higher to catch derivative terms
    previous = enumerate_basis(operator, trunc.shifted(-operator.ghost_shift, trunc.base_poly_degree + 1))
    incoming = [operator(p) for p in previous]
    incoming = [p for p in incoming if p]
    if incoming:
        image_dimension = _span_rank(incoming) + _span_rank(source) - _span_rank(incoming + source)
    else:
        image_dimension = 0
    if rank(outgoing.rows, outgoing.shape) + len(kernel) != len(source):
        raise GsysError("Rank-nullity bookkeeping failed")
    representatives = []
    span = list(incoming)
    current = _span_rank(span)
    for candidate in kernel:
        extended = _span_rank(span + [candidate])
        if extended > current:
            representatives.append(candidate)
            span.append(candidate)
            current = extended
        if len(representatives) == len(kernel) - image_dimension:
            break
    report = CohomologyReport(trunc, operator.name, len(source), len(kernel), image_dimension, representatives)
    logger.info(f"H at {trunc}: ker {report.kernel_dimension}, im {image_dimension}, dim {report.dimension}")
    return report


def is_cocycle(operator: GradedOperator, F: SuperPolynomial) -> bool:
    return not operator(F)


def coboundary_preimage(operator: GradedOperator, F: SuperPolynomial, trunc: Truncation) -> Optional[SuperPolynomial]:
    """G with D G = F in the previous ghost degree, or None when no G exists at the bound."""
    if operator(F):
        raise NotACocycle(f"{F.to_text()} is not closed under {operator.name}")
    if not F:
        return SuperPolynomial.zero(operator.chart)
    previous = enumerate_basis(operator, trunc.shifted(-operator.ghost_shift, trunc.base_poly_degree + 1))
    if not previous:
        return None
    weights = PolynomialSystem([operator(p) for p in previous]).solve(F)
    if weights is None:
        return None
    G = combine(operator.chart, previous, weights)
    if operator(G) != F:
        raise GsysError("Coboundary preimage does not reproduce its target")
    return G


def bigraded_table(operator: GradedOperator, k_values: Sequence[int], l_values: Sequence[int],
                   base_poly_degree: int, res_cap: Optional[int] = None, progress: bool = False) -> pd.DataFrame:
    """Cohomology dimensions, rows indexed by k, columns by l."""
    table = pd.DataFrame(index=pd.Index(list(k_values), name='k'), columns=pd.Index(list(l_values), name='l'),
                         dtype=object)
    for k in k_values:
        for l in l_values:
            report = cohomology_at(operator, Truncation(base_poly_degree, l, k, res_cap), progress)
            table.loc[k, l] = report.dimension
    return table


def lemma_check(operator: GradedOperator, trunc: Truncation) -> Tuple[str, CohomologyReport]:
    """For k > l the cohomology must vanish; a nonzero truncated class means the bound is too small."""
    report = cohomology_at(operator, trunc)
    if trunc.degree <= trunc.ghost_degree:
        return 'not-applicable', report
    return ('consistent' if report.dimension == 0 else 'bound too small'), report
