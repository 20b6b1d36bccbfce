"""
Finite monomial bases: base-coordinate monomials up to a degree times fiber
monomials with prescribed gradings. Used for unknowns of the perturbative
solvers, ideal membership and truncated cohomology.
"""
import sys
from itertools import combinations_with_replacement
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

sys.path.append(str(Path(__file__).parent.parent))
from graded.grading import Chart, GRADING_NAMES, VariableKind, grading_field
from graded.superpoly import Key, SuperPolynomial, monomial


def base_keys(chart: Chart, max_degree: int, min_degree: int = 0) -> List[Key]:
    """Monomials in the base coordinates with min_degree <= total degree <= max_degree."""
    bases = [chart.index(v.name) for v in chart.of_kind(VariableKind.BASE)]
    keys: List[Key] = []
    for degree in range(min_degree, max_degree + 1):
        for combo in combinations_with_replacement(bases, degree):
            counts: Dict[int, int] = {}
            for index in combo:
                counts[index] = counts.get(index, 0) + 1
            keys.append(tuple(sorted(counts.items())))
    return keys


def fiber_keys(chart: Chart, names: Sequence[str], targets: Dict[str, int],
               upper: Optional[Dict[str, int]] = None, even_cap: int = 3) -> List[Key]:
    """
    Monomials in the listed non-base variables whose gradings hit `targets`
    exactly and stay below `upper`. Even variables get exponents up to even_cap.
    """
    indices = sorted(chart.index(n) for n in names)
    wanted = {grading_field(k): v for k, v in targets.items()}
    limits = {grading_field(k): v for k, v in (upper or {}).items()}
    rows = []
    for index in indices:
        grading = chart.gradings[index]
        rows.append({f: getattr(grading, f) for f in GRADING_NAMES})
    # fields whose values never decrease along the search can prune early
    monotone = {f for f in GRADING_NAMES
                if f != 'parity' and all(r[f] is not None and r[f] >= 0 for r in rows)}
    for f, value in wanted.items():
        if f in monotone:
            limits[f] = min(limits.get(f, value), value)

    results: List[Key] = []

    def search(position: int, key: list, totals: Dict[str, Optional[int]]):
        if position == len(indices):
            for f, value in wanted.items():
                total = totals[f]
                if f == 'parity' and total is not None:
                    total %= 2
                if total != value:
                    return
            for f, value in limits.items():
                if totals[f] is None or totals[f] > value:
                    return
            results.append(tuple(key))
            return
        index = indices[position]
        top = 1 if chart.odd[index] else even_cap
        for exponent in range(top + 1):
            new_totals = dict(totals)
            if exponent:
                for f in GRADING_NAMES:
                    step = rows[position][f]
                    new_totals[f] = None if step is None or totals[f] is None else totals[f] + step * exponent
            if any(f in monotone and new_totals[f] is not None and new_totals[f] > limit
                   for f, limit in limits.items()):
                break
            search(position + 1, key + ([(index, exponent)] if exponent else []), new_totals)

    search(0, [], {f: 0 for f in GRADING_NAMES})
    return results


def truncated_basis(chart: Chart, fiber_names: Sequence[str], targets: Dict[str, int], base_max_degree: int,
                    upper: Optional[Dict[str, int]] = None, even_cap: int = 3,
                    keep: Optional[Callable[[Key], bool]] = None, base_min_degree: int = 0) -> List[SuperPolynomial]:
    """Products base-monomial * fiber-monomial, ordered by base degree then canonical key."""
    fibers = fiber_keys(chart, fiber_names, targets, upper, even_cap)
    bases = base_keys(chart, base_max_degree, base_min_degree)
    basis = []
    for base in bases:
        for fiber in fibers:
            # base coordinates precede every fiber variable in each chart
            key = base + fiber
            if keep is None or keep(key):
                basis.append(monomial(chart, key))
    return basis
