"""
Random homogeneous polynomials for the property suites.

Every sampler takes a numpy Generator so runs are reproducible from a seed.
"""
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

sys.path.append(str(Path(__file__).parent.parent))
from graded.grading import Chart, grading_field
from graded.superpoly import Key, SuperPolynomial, multiply_keys


def make_rng(seed: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_key(chart: Chart, rng: np.random.Generator, indices: Sequence[int], max_degree: int) -> Key:
    key: Key = ()
    for _ in range(int(rng.integers(0, max_degree + 1))):
        index = int(indices[int(rng.integers(0, len(indices)))])
        sign, product = multiply_keys(chart.odd, key, ((index, 1),))
        if sign:
            key = product
    return key


def random_coefficient(rng: np.random.Generator, max_coefficient: int = 3) -> Fraction:
    numerator = 0
    while numerator == 0:
        numerator = int(rng.integers(-max_coefficient, max_coefficient + 1))
    return Fraction(numerator, int(rng.integers(1, 3)))


def random_homogeneous(chart: Chart, rng: np.random.Generator, names: Optional[Sequence[str]] = None,
                       homogeneous_in: Tuple[str, ...] = ('parity',), n_terms: int = 3,
                       max_degree: int = 3, max_coefficient: int = 3,
                       target: Optional[Dict[str, int]] = None) -> SuperPolynomial:
    """
    Random polynomial homogeneous in the listed gradings.

    Args:
        names: variables to draw from (default: the whole chart)
        homogeneous_in: gradings shared by every monomial
        target: fixed values for some of those gradings; the rest follow the first monomial drawn
    """
    indices = [chart.index(n) for n in names] if names is not None else list(range(len(chart)))
    fields = [grading_field(w) for w in homogeneous_in]
    wanted = {grading_field(k): v for k, v in (target or {}).items()}
    terms: Dict[Key, Fraction] = {}
    empty = SuperPolynomial.zero(chart)
    for _ in range(n_terms * 20):
        if len(terms) >= n_terms:
            break
        key = random_key(chart, rng, indices, max_degree)
        grading = empty.monomial_grading(key)
        values = {f: getattr(grading, f) for f in fields}
        if any(values[f] is None for f in fields):
            continue
        if any(f in wanted and wanted[f] != values[f] for f in fields):
            continue
        wanted.update(values)
        terms[key] = terms.get(key, 0) + random_coefficient(rng, max_coefficient)
    return SuperPolynomial(chart, terms)


def random_samples(chart: Chart, rng: np.random.Generator, count: int, **kwargs) -> List[SuperPolynomial]:
    return [random_homogeneous(chart, rng, **kwargs) for _ in range(count)]
