"""
Exact polynomials in even and odd graded variables.

A monomial key is a tuple of (variable index, exponent) pairs sorted by the
chart's canonical order; odd variables carry exponent 1. Coefficients are
fractions.Fraction. Reordering two odd factors flips the sign (Koszul rule).
"""
import sys
from fractions import Fraction
from numbers import Rational
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Set, Tuple, Union

sys.path.append(str(Path(__file__).parent.parent))
from gsys_utils import fraction_text
from graded.grading import (
    Chart, ChartError, GradedVariable, Grading, GradingError, ParityError, VariableKind, ZERO_GRADING,
    grading_field,
)

Key = Tuple[Tuple[int, int], ...]
Scalar = Union[int, Fraction]
VariableRef = Union[str, GradedVariable, int]


class Monomial(NamedTuple):
    coefficient: Fraction
    factors: Tuple[Tuple[str, int], ...]


def multiply_keys(odd: Sequence[bool], left: Key, right: Key) -> Tuple[int, Optional[Key]]:
    """Product of two sorted monomial keys; returns (sign, key) or (0, None) for an odd square."""
    sign = 1
    pending_odd = sum(1 for index, _ in left if odd[index])
    merged = []
    i = j = 0
    while i < len(left) and j < len(right):
        a, ea = left[i]
        b, eb = right[j]
        if a < b:
            merged.append(left[i])
            if odd[a]:
                pending_odd -= 1
            i += 1
        elif b < a:
            if odd[b] and pending_odd % 2:
                sign = -sign
            merged.append(right[j])
            j += 1
        else:
            if odd[a]:
                return 0, None
            merged.append((a, ea + eb))
            i += 1
            j += 1
    merged.extend(left[i:])
    merged.extend(right[j:])
    return sign, tuple(merged)


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    raise TypeError(f"Coefficients must be exact rationals, got {type(value).__name__}")


class SuperPolynomial:
    """Immutable polynomial on one chart, stored in canonical normal form."""

    __slots__ = ('chart', '_terms')

    def __init__(self, chart: Chart, terms: Optional[Mapping[Key, Scalar]] = None):
        self.chart = chart
        self._terms: Dict[Key, Fraction] = {}
        for key, value in (terms or {}).items():
            value = _as_fraction(value)
            if value != 0:
                self._terms[key] = value

    @classmethod
    def _wrap(cls, chart: Chart, terms: Dict[Key, Fraction]) -> 'SuperPolynomial':
        poly = cls.__new__(cls)
        poly.chart = chart
        poly._terms = {k: v for k, v in terms.items() if v != 0}
        return poly

    # Constructors

    @classmethod
    def zero(cls, chart: Chart) -> 'SuperPolynomial':
        return cls._wrap(chart, {})

    @classmethod
    def constant(cls, chart: Chart, value: Scalar) -> 'SuperPolynomial':
        return cls._wrap(chart, {(): _as_fraction(value)})

    @classmethod
    def variable(cls, chart: Chart, ref: VariableRef) -> 'SuperPolynomial':
        return cls._wrap(chart, {((resolve_index(chart, ref), 1),): Fraction(1)})

    # Inspection

    @property
    def terms(self) -> Dict[Key, Fraction]:
        return dict(self._terms)

    def items(self) -> List[Tuple[Key, Fraction]]:
        """Terms in canonical print order."""
        return sorted(self._terms.items(), key=lambda kv: (sum(e for _, e in kv[0]), kv[0]))

    def monomials(self) -> Iterator[Monomial]:
        names = self.chart.names
        for key, coeff in self.items():
            yield Monomial(coeff, tuple((names[i], e) for i, e in key))

    def coefficient(self, key: Key) -> Fraction:
        return self._terms.get(key, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def variables_used(self) -> Set[str]:
        names = self.chart.names
        return {names[i] for key in self._terms for i, _ in key}

    def constant_term(self) -> Fraction:
        return self._terms.get((), Fraction(0))

    # Arithmetic

    def _coerce(self, other) -> 'SuperPolynomial':
        if isinstance(other, SuperPolynomial):
            if other.chart is not self.chart and other.chart != self.chart:
                raise ChartError(f"Cannot combine polynomials on {self.chart!r} and {other.chart!r}")
            return other
        return SuperPolynomial.constant(self.chart, _as_fraction(other))

    def __add__(self, other) -> 'SuperPolynomial':
        other = self._coerce(other)
        terms = dict(self._terms)
        for key, value in other._terms.items():
            terms[key] = terms.get(key, 0) + value
        return SuperPolynomial._wrap(self.chart, terms)

    __radd__ = __add__

    def __neg__(self) -> 'SuperPolynomial':
        return SuperPolynomial._wrap(self.chart, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other) -> 'SuperPolynomial':
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> 'SuperPolynomial':
        return self._coerce(other) - self

    def scale(self, factor: Scalar) -> 'SuperPolynomial':
        factor = _as_fraction(factor)
        if factor == 0:
            return SuperPolynomial.zero(self.chart)
        return SuperPolynomial._wrap(self.chart, {k: v * factor for k, v in self._terms.items()})

    def __mul__(self, other) -> 'SuperPolynomial':
        if not isinstance(other, SuperPolynomial):
            return self.scale(other)
        other = self._coerce(other)
        odd = self.chart.odd
        terms: Dict[Key, Fraction] = {}
        for k1, v1 in self._terms.items():
            for k2, v2 in other._terms.items():
                sign, key = multiply_keys(odd, k1, k2)
                if sign:
                    terms[key] = terms.get(key, 0) + (v1 * v2 if sign > 0 else -(v1 * v2))
        return SuperPolynomial._wrap(self.chart, terms)

    def __rmul__(self, other) -> 'SuperPolynomial':
        # Only scalars reach here; scalars are central.
        return self.scale(other)

    def __truediv__(self, other) -> 'SuperPolynomial':
        return self.scale(1 / _as_fraction(other))

    def __pow__(self, exponent: int) -> 'SuperPolynomial':
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("Only non-negative integer powers are defined")
        result = SuperPolynomial.constant(self.chart, 1)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, SuperPolynomial):
            return self.chart == other.chart and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == ({(): Fraction(other)} if other != 0 else {})
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    # Gradings

    def monomial_grading(self, key: Key) -> Grading:
        gradings = self.chart.gradings
        result = ZERO_GRADING
        for index, exponent in key:
            result = result + gradings[index].scaled(exponent)
        return result

    def grading_values(self, which: str) -> Set[Optional[int]]:
        field = grading_field(which)
        return {getattr(self.monomial_grading(key), field) for key in self._terms}

    def parity(self) -> int:
        """Common parity; the zero polynomial counts as even."""
        values = self.grading_values('parity')
        if len(values) > 1:
            raise GradingError(f"Polynomial is not homogeneous in parity: {self.to_text()}")
        return values.pop() if values else 0

    def components(self, which: str) -> Dict[Optional[int], 'SuperPolynomial']:
        """Split into homogeneous components of one grading."""
        field = grading_field(which)
        buckets: Dict[Optional[int], Dict[Key, Fraction]] = {}
        for key, value in self._terms.items():
            buckets.setdefault(getattr(self.monomial_grading(key), field), {})[key] = value
        return {g: SuperPolynomial._wrap(self.chart, terms) for g, terms in buckets.items()}

    def component(self, which: str, value: int) -> 'SuperPolynomial':
        return self.components(which).get(value, SuperPolynomial.zero(self.chart))

    def base_degree(self) -> int:
        """Largest total degree in base coordinates over all monomials."""
        mask = self.chart.base_mask
        return max((sum(e for i, e in key if mask[i]) for key in self._terms), default=0)

    def filter(self, keep) -> 'SuperPolynomial':
        return SuperPolynomial._wrap(self.chart, {k: v for k, v in self._terms.items() if keep(k)})

    # Printing

    def to_text(self) -> str:
        if not self._terms:
            return '0'
        names = self.chart.names
        pieces = []
        for key, coeff in self.items():
            factors = '*'.join(names[i] if e == 1 else f"{names[i]}^{e}" for i, e in key)
            magnitude = abs(coeff)
            if not factors:
                body = fraction_text(magnitude)
            elif magnitude == 1:
                body = factors
            else:
                body = f"{fraction_text(magnitude)}*{factors}"
            if not pieces:
                pieces.append(f"-{body}" if coeff < 0 else body)
            else:
                pieces.append(f" - {body}" if coeff < 0 else f" + {body}")
        return ''.join(pieces)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"SuperPolynomial({self.to_text()})"


def resolve_index(chart: Chart, ref: VariableRef) -> int:
    if isinstance(ref, int):
        if not 0 <= ref < len(chart):
            raise ChartError(f"Variable index {ref} out of range")
        return ref
    if isinstance(ref, GradedVariable):
        index = chart.index(ref.name)
        if chart.variables[index] != ref:
            raise ChartError(f"Variable {ref.name!r} does not belong to {chart!r}")
        return index
    return chart.index(ref)


def normalize(chart: Chart, raw_terms: Iterable[Tuple[Scalar, Sequence[Union[str, Tuple[str, int]]]]]) -> SuperPolynomial:
    """
    Canonical form of a raw term list.

    Each raw term is (coefficient, factors) with factors in written order, a
    factor being a variable name or a (name, exponent) pair. Repeated names
    and odd factors out of order are allowed.
    """
    result = SuperPolynomial.zero(chart)
    for coefficient, factors in raw_terms:
        term = SuperPolynomial.constant(chart, coefficient)
        for factor in factors:
            name, exponent = (factor, 1) if isinstance(factor, str) else factor
            term = term * SuperPolynomial.variable(chart, name) ** exponent
        result = result + term
    return result


def left_derivative(F: SuperPolynomial, v: VariableRef) -> SuperPolynomial:
    """Derivation acting from the left; an odd v picks up the sign of the odd factors before it."""
    target = resolve_index(F.chart, v)
    odd = F.chart.odd
    terms: Dict[Key, Fraction] = {}
    for key, coeff in F._terms.items():
        for position, (index, exponent) in enumerate(key):
            if index != target:
                continue
            if odd[target]:
                before = sum(1 for i, _ in key[:position] if odd[i])
                reduced = key[:position] + key[position + 1:]
                value = -coeff if before % 2 else coeff
            else:
                rest = ((index, exponent - 1),) if exponent > 1 else ()
                reduced = key[:position] + rest + key[position + 1:]
                value = coeff * exponent
            terms[reduced] = terms.get(reduced, 0) + value
            break
    return SuperPolynomial._wrap(F.chart, terms)


def right_derivative(F: SuperPolynomial, v: VariableRef) -> SuperPolynomial:
    """(-1)^{e(v)(e(F)+1)} times the left derivative, applied monomial by monomial."""
    target = resolve_index(F.chart, v)
    left = left_derivative(F, target)
    if not F.chart.odd[target]:
        return left
    terms = {}
    for key, coeff in left._terms.items():
        # the derivative of a monomial of parity p has parity p + 1
        parity_before = (sum(e for i, e in key if F.chart.odd[i]) + 1) % 2
        terms[key] = -coeff if parity_before == 0 else coeff
    return SuperPolynomial._wrap(F.chart, terms)


def substitute(F: SuperPolynomial, assignment: Mapping[VariableRef, SuperPolynomial]) -> SuperPolynomial:
    """Replace variables by polynomials of the same parity, multiplying out in canonical order."""
    chart = F.chart
    replacements: Dict[int, SuperPolynomial] = {}
    for ref, value in assignment.items():
        index = resolve_index(chart, ref)
        if not isinstance(value, SuperPolynomial):
            value = SuperPolynomial.constant(chart, value)
        if value.chart != chart:
            raise ChartError("Replacement polynomial lives on a different chart")
        if value and value.parity() != (1 if chart.odd[index] else 0):
            raise ParityError(f"Replacement for {chart.names[index]!r} has the wrong parity: {value.to_text()}")
        replacements[index] = value
    if all(not value for value in replacements.values()):
        return restrict(F, replacements.keys())
    result = SuperPolynomial.zero(chart)
    for key, coeff in F._terms.items():
        term = SuperPolynomial.constant(chart, coeff)
        for index, exponent in key:
            factor = replacements.get(index)
            if factor is None:
                factor = SuperPolynomial._wrap(chart, {((index, 1),): Fraction(1)})
            term = term * factor ** exponent
            if not term:
                break
        result = result + term
    return result


def restrict(F: SuperPolynomial, refs: Iterable[VariableRef]) -> SuperPolynomial:
    """Set the listed variables to zero."""
    dropped = {resolve_index(F.chart, ref) for ref in refs}
    return F.filter(lambda key: not any(i in dropped for i, _ in key))


def restrict_to_M(F: SuperPolynomial) -> SuperPolynomial:
    """phi* = 0 (and dphi* = 0 when present)."""
    kinds = (VariableKind.MOMENTUM, VariableKind.VELOCITY_MOMENTUM)
    return restrict(F, [v.name for v in F.chart.of_kind(*kinds)])


def restrict_to_L(F: SuperPolynomial) -> SuperPolynomial:
    """The Lagrangian locus phi* = 0 = dphi* on the odd tangent chart."""
    return restrict_to_M(F)


def embed(F: SuperPolynomial, target: Chart) -> SuperPolynomial:
    """Move F to another chart by variable name, re-sorting odd factors with the Koszul sign."""
    source_names = F.chart.names
    mapping = [target.index(name) if name in target else None for name in source_names]
    odd = target.odd
    terms: Dict[Key, Fraction] = {}
    for key, coeff in F._terms.items():
        mapped = []
        for index, exponent in key:
            if mapping[index] is None:
                raise ChartError(f"Variable {source_names[index]!r} is missing from {target!r}")
            mapped.append((mapping[index], exponent))
        odd_positions = [m for m, _ in mapped if odd[m]]
        inversions = sum(1 for a in range(len(odd_positions)) for b in range(a + 1, len(odd_positions))
                         if odd_positions[a] > odd_positions[b])
        new_key = tuple(sorted(mapped))
        terms[new_key] = terms.get(new_key, 0) + (-coeff if inversions % 2 else coeff)
    return SuperPolynomial._wrap(target, terms)


def grading_of(F: SuperPolynomial, which: str) -> int:
    """Common value of one grading over all monomials of F."""
    values = F.grading_values(which)
    if not values:
        raise GradingError("The zero polynomial carries no grading")
    if len(values) > 1:
        raise GradingError(f"Polynomial is not homogeneous in {grading_field(which)}: {F.to_text()}")
    value = values.pop()
    if value is None:
        raise GradingError(f"{grading_field(which)} does not apply to {F.to_text()}")
    return value


def sum_polynomials(chart: Chart, polys: Iterable[SuperPolynomial]) -> SuperPolynomial:
    terms: Dict[Key, Fraction] = {}
    for poly in polys:
        for key, value in poly._terms.items():
            terms[key] = terms.get(key, 0) + value
    return SuperPolynomial._wrap(chart, terms)


def monomial(chart: Chart, key: Key, coefficient: Scalar = 1) -> SuperPolynomial:
    return SuperPolynomial._wrap(chart, {key: _as_fraction(coefficient)})
