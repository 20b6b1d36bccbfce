"""
Gauge system initial data and the master function container.

A GaugeSystemSpec holds constraints T^a (functions on M), gauge generators
R_alpha (vector fields, linear in x*), an optional bivector P, an optional
dynamics V and optional connection coefficients. Multivectors are encoded
on the multivector chart with d/dx^i -> x*_i.
"""
import logging
import sys
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

sys.path.append(str(Path(__file__).parent.parent))
from gsys_utils import GsysError
from graded.grading import (
    Chart, ChartLevel, GradingError, VariableKind, build_extended_chart, build_multivector_chart,
    build_tangent_chart,
)
from graded.superpoly import SuperPolynomial, embed, grading_of, sum_polynomials
from brackets.bracket_engine import odd_bracket, schouten
from brackets.tables import ConnectionData

logger = logging.getLogger(__name__)


class GaugeSystemError(GsysError):
    """Malformed gauge system data."""


class NoSolutionAtBound(GsysError):
    """A bounded-degree linear system has no solution; carries the residual."""

    def __init__(self, message: str, residual: Optional[SuperPolynomial] = None, step: Optional[int] = None):
        super().__init__(message)
        self.residual = residual
        self.step = step


@dataclass
class StructureWitnesses:
    """f^gamma_{alpha beta} and X_{a alpha beta} for [[R_a, R_b]] = f R + T X, keyed by (alpha, beta)."""
    f: Dict[Tuple[int, int], Dict[int, SuperPolynomial]] = field(default_factory=dict)
    X: Dict[Tuple[int, int], Dict[int, SuperPolynomial]] = field(default_factory=dict)

    def pairs(self) -> List[Tuple[int, int]]:
        return sorted(set(self.f) | set(self.X))


@dataclass
class GaugeSystemSpec:
    base_coords: List[str]
    constraints: List[SuperPolynomial] = field(default_factory=list)
    generators: List[SuperPolynomial] = field(default_factory=list)
    bivector: Optional[SuperPolynomial] = None
    dynamics: Optional[SuperPolynomial] = None
    connection: Optional[ConnectionData] = None
    structure_witnesses: Optional[StructureWitnesses] = None
    constraint_names: List[str] = field(default_factory=list)
    generator_names: List[str] = field(default_factory=list)

    @cached_property
    def multivector_chart(self) -> Chart:
        return build_multivector_chart(self.base_coords)

    @cached_property
    def extended_chart(self) -> Chart:
        return build_extended_chart(self.base_coords, len(self.constraints), len(self.generators))

    @cached_property
    def tangent_chart(self) -> Chart:
        return build_tangent_chart(self.extended_chart)

    def validate(self) -> None:
        """Gradings of the initial data: Deg(T) = 0, Deg(R) = 1, Deg(P) = 2, Deg(V) = 1."""
        chart = self.multivector_chart
        expected = [('constraint', p, 0) for p in self.constraints]
        expected += [('generator', p, 1) for p in self.generators]
        if self.bivector is not None:
            expected.append(('bivector', self.bivector, 2))
        if self.dynamics is not None:
            expected.append(('dynamics', self.dynamics, 1))
        for label, poly, degree in expected:
            if poly.chart != chart:
                raise GaugeSystemError(f"{label} {poly.to_text()} is not on the multivector chart")
            if poly and grading_of(poly, 'deg') != degree:
                raise GradingError(f"{label} {poly.to_text()} must have momentum degree {degree}")
        if self.connection is not None:
            for (upper, lower, base), value in self.connection.coefficients:
                if value.chart != self.extended_chart:
                    raise GaugeSystemError(f"Connection coefficient ({upper},{lower},{base}) is on the wrong chart")

    def to_N(self, poly: SuperPolynomial) -> SuperPolynomial:
        return poly if poly.chart == self.extended_chart else embed(poly, self.extended_chart)

    def to_M(self, poly: SuperPolynomial) -> SuperPolynomial:
        return poly if poly.chart == self.multivector_chart else embed(poly, self.multivector_chart)

    def ghost(self, alpha: int) -> SuperPolynomial:
        return SuperPolynomial.variable(self.extended_chart, f"c{alpha + 1}")

    def antighost(self, a: int) -> SuperPolynomial:
        return SuperPolynomial.variable(self.extended_chart, f"eta{a + 1}")

    def bracket(self, F: SuperPolynomial, G: SuperPolynomial) -> SuperPolynomial:
        """Odd bracket on the extended chart, honoring the connection."""
        return odd_bracket(self.to_N(F), self.to_N(G), self.connection)


@dataclass
class MasterFunction:
    """A ghost-2 even function on the extended chart with its verification state."""
    value: SuperPolynomial
    verified_degree_bound: Optional[int] = None
    verified: bool = False
    steps: List[SuperPolynomial] = field(default_factory=list)

    @property
    def chart(self) -> Chart:
        return self.value.chart

    def by_momentum(self) -> Dict[int, SuperPolynomial]:
        return {k: v for k, v in self.value.components('deg').items()}

    def by_resolution(self) -> Dict[int, SuperPolynomial]:
        return {k: v for k, v in self.value.components('res').items()}

    def momentum_part(self, degree: int) -> SuperPolynomial:
        return self.value.component('deg', degree)

    def resolution_part(self, degree: int) -> SuperPolynomial:
        return self.value.component('res', degree)

    def check_gradings(self) -> None:
        if not self.value:
            return
        if self.value.chart.level is not ChartLevel.N:
            raise GradingError("A master function lives on the extended chart")
        if grading_of(self.value, 'parity') != 0 or grading_of(self.value, 'ghost') != 2:
            raise GradingError(f"Master function must be even with ghost 2: {self.value.to_text()}")
        if min(self.value.grading_values('deg')) < 1:
            raise GradingError("Every monomial of a master function needs momentum degree >= 1")


@dataclass
class MembershipCertificate:
    """U = sum_a A_a T^a + sum_alpha B^alpha R_alpha, with the witnesses A, B."""
    verdict: str
    degree_bound: int
    constraint_witnesses: List[SuperPolynomial] = field(default_factory=list)
    generator_witnesses: List[SuperPolynomial] = field(default_factory=list)
    target: Optional[SuperPolynomial] = None
    reason: str = ''

    def reconstruct(self, spec: GaugeSystemSpec) -> SuperPolynomial:
        chart = spec.multivector_chart
        pieces = [a * t for a, t in zip(self.constraint_witnesses, spec.constraints)]
        pieces += [b * r for b, r in zip(self.generator_witnesses, spec.generators)]
        return sum_polynomials(chart, pieces)

    @property
    def is_member(self) -> bool:
        return self.verdict == 'pass'


def assemble_S0(spec: GaugeSystemSpec) -> MasterFunction:
    """S0 = T^a eta*_a + c^alpha R_alpha + P on the extended chart."""
    spec.validate()
    chart = spec.extended_chart
    pieces = []
    for a, constraint in enumerate(spec.constraints):
        pieces.append(spec.to_N(constraint) * SuperPolynomial.variable(chart, f"etas{a + 1}"))
    for alpha, generator in enumerate(spec.generators):
        pieces.append(spec.ghost(alpha) * spec.to_N(generator))
    if spec.bivector is not None:
        pieces.append(spec.to_N(spec.bivector))
    S0 = MasterFunction(sum_polynomials(chart, pieces))
    S0.check_gradings()
    logger.debug(f"Assembled S0 = {S0.value.to_text()}")
    return S0


def verify_structure_witnesses(spec: GaugeSystemSpec) -> Dict[Tuple[int, int], SuperPolynomial]:
    """Residual [[R_a, R_b]] - f^g_{ab} R_g - T^a X_{a ab} for each supplied generator pair."""
    witnesses = spec.structure_witnesses
    if witnesses is None:
        return {}
    chart = spec.multivector_chart
    residuals = {}
    for alpha, beta in witnesses.pairs():
        if not (0 <= alpha < len(spec.generators) and 0 <= beta < len(spec.generators)):
            raise GaugeSystemError(f"Structure witness refers to unknown generator pair ({alpha + 1}, {beta + 1})")
        residual = schouten(spec.generators[alpha], spec.generators[beta])
        for gamma, f in witnesses.f.get((alpha, beta), {}).items():
            residual = residual - f * spec.generators[gamma]
        for a, X in witnesses.X.get((alpha, beta), {}).items():
            residual = residual - spec.constraints[a] * X
        residuals[(alpha, beta)] = residual
    return residuals
