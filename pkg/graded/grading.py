"""
Gradings, graded variables and charts for the extended manifold and its odd tangent bundle.

Chart levels:
    M     - odd cotangent bundle of the base (x^i, x*_i): multivector fields
    N     - extended manifold with momenta (x, eta, c, x*, eta*, c*)
    PiTN  - odd tangent bundle of N (N coordinates plus their velocities)
"""
import sys
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

sys.path.append(str(Path(__file__).parent.parent))
from gsys_utils import GsysError


class GradingError(GsysError):
    """Inhomogeneous input or a grading that does not apply."""


class ChartError(GsysError):
    """Unknown variable, duplicate name or mixing of charts."""


class ParityError(GsysError):
    """A substitution or operation that would break Grassmann parity."""


GRADING_NAMES = ('parity', 'ghost', 'momentum_degree', 'resolution_degree', 'form_degree')

GRADING_ALIASES = {
    'parity': 'parity', 'eps': 'parity', 'epsilon': 'parity',
    'ghost': 'ghost', 'gh': 'ghost',
    'momentum_degree': 'momentum_degree', 'deg': 'momentum_degree', 'momentum': 'momentum_degree',
    'resolution_degree': 'resolution_degree', 'res': 'resolution_degree', 'resolution': 'resolution_degree',
    'form_degree': 'form_degree', 'form': 'form_degree',
}


def grading_field(which: str) -> str:
    try:
        return GRADING_ALIASES[which]
    except KeyError:
        raise GradingError(f"Unknown grading {which!r}; expected one of {', '.join(GRADING_NAMES)}")


def _add_optional(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None or b is None:
        return None
    return a + b


@dataclass(frozen=True)
class Grading:
    """Multi-grading of a generator; None marks a grading that does not apply."""
    parity: int
    ghost: int
    momentum_degree: Optional[int] = 0
    resolution_degree: Optional[int] = 0
    form_degree: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'parity', self.parity % 2)

    def __add__(self, other: 'Grading') -> 'Grading':
        return Grading(
            parity=self.parity + other.parity,
            ghost=self.ghost + other.ghost,
            momentum_degree=_add_optional(self.momentum_degree, other.momentum_degree),
            resolution_degree=_add_optional(self.resolution_degree, other.resolution_degree),
            form_degree=self.form_degree + other.form_degree,
        )

    def scaled(self, times: int) -> 'Grading':
        return Grading(
            parity=self.parity * times,
            ghost=self.ghost * times,
            momentum_degree=None if self.momentum_degree is None else self.momentum_degree * times,
            resolution_degree=None if self.resolution_degree is None else self.resolution_degree * times,
            form_degree=self.form_degree * times,
        )

    def value(self, which: str) -> Optional[int]:
        return getattr(self, grading_field(which))


ZERO_GRADING = Grading(0, 0, 0, 0, 0)


class VariableKind(Enum):
    BASE = 'base'
    GHOST_FIBER = 'ghost-fiber'
    ANTIGHOST_FIBER = 'antighost-fiber'
    MOMENTUM = 'momentum'
    VELOCITY = 'velocity'
    VELOCITY_MOMENTUM = 'velocity-momentum'


class ChartLevel(Enum):
    M = 'M'
    N = 'N'
    PITN = 'PiTN'


@dataclass(frozen=True)
class GradedVariable:
    name: str
    grading: Grading
    kind: VariableKind
    partner: Optional[str] = None

    @property
    def parity(self) -> int:
        return self.grading.parity

    @property
    def is_odd(self) -> bool:
        return self.grading.parity == 1

    def form_degree_expected(self) -> int:
        return 1 if self.kind in (VariableKind.VELOCITY, VariableKind.VELOCITY_MOMENTUM) else 0


class Chart:
    """Ordered list of graded variables; the declaration order is the canonical order."""

    def __init__(self, variables: Sequence[GradedVariable], level: ChartLevel):
        self.variables: Tuple[GradedVariable, ...] = tuple(variables)
        self.level = level
        self._index: Dict[str, int] = {}
        for position, var in enumerate(self.variables):
            if var.name in self._index:
                raise ChartError(f"Duplicate variable name {var.name!r} in chart")
            self._index[var.name] = position
        self.odd: Tuple[bool, ...] = tuple(v.is_odd for v in self.variables)
        self.gradings: Tuple[Grading, ...] = tuple(v.grading for v in self.variables)
        self.base_mask: Tuple[bool, ...] = tuple(v.kind is VariableKind.BASE for v in self.variables)
        self._validate()

    def _validate(self):
        allowed = {
            ChartLevel.M: {VariableKind.BASE, VariableKind.MOMENTUM},
            ChartLevel.N: {VariableKind.BASE, VariableKind.GHOST_FIBER,
                           VariableKind.ANTIGHOST_FIBER, VariableKind.MOMENTUM},
            ChartLevel.PITN: set(VariableKind),
        }[self.level]
        for var in self.variables:
            if var.kind not in allowed:
                raise ChartError(f"{var.kind.value} variable {var.name!r} not allowed at level {self.level.value}")
            if var.form_degree_expected() != var.grading.form_degree:
                raise GradingError(f"Variable {var.name!r} has form degree {var.grading.form_degree}")
            if var.kind in (VariableKind.MOMENTUM, VariableKind.VELOCITY, VariableKind.VELOCITY_MOMENTUM):
                if var.partner not in self._index:
                    raise ChartError(f"Variable {var.name!r} has no partner {var.partner!r} in chart")
            if var.kind is VariableKind.MOMENTUM:
                partner = self.variable(var.partner)
                if var.grading.ghost != 1 - partner.grading.ghost:
                    raise GradingError(f"Momentum {var.name!r} must have ghost 1 - gh({partner.name})")
                if var.parity != (partner.parity + 1) % 2:
                    raise GradingError(f"Momentum {var.name!r} must have opposite parity to {partner.name!r}")

    def __len__(self) -> int:
        return len(self.variables)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __iter__(self):
        return iter(self.variables)

    def __eq__(self, other) -> bool:
        return isinstance(other, Chart) and self.level == other.level and self.variables == other.variables

    def __hash__(self) -> int:
        return hash((self.level, self.variables))

    def __repr__(self) -> str:
        return f"Chart({self.level.value}: {' '.join(self.names)})"

    @property
    def names(self) -> List[str]:
        return [v.name for v in self.variables]

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ChartError(f"Unknown variable {name!r}")

    def variable(self, name: str) -> GradedVariable:
        return self.variables[self.index(name)]

    def of_kind(self, *kinds: VariableKind) -> List[GradedVariable]:
        return [v for v in self.variables if v.kind in kinds]

    def momentum_of(self, name: str) -> GradedVariable:
        """The odd momentum phi*_A paired with the coordinate phi^A."""
        for var in self.variables:
            if var.kind is VariableKind.MOMENTUM and var.partner == name:
                return var
        raise ChartError(f"No momentum for {name!r} in chart")

    def velocity_of(self, name: str) -> GradedVariable:
        for var in self.variables:
            if var.kind in (VariableKind.VELOCITY, VariableKind.VELOCITY_MOMENTUM) and var.partner == name:
                return var
        raise ChartError(f"No velocity for {name!r} in chart")

    def coordinates(self) -> List[GradedVariable]:
        """The phi^A of the chart, in canonical order."""
        return self.of_kind(VariableKind.BASE, VariableKind.ANTIGHOST_FIBER, VariableKind.GHOST_FIBER)


# Table of gradings for coordinates and momenta on the extended manifold.
BASE_GRADING = Grading(0, 0, 0, 0)
ANTIGHOST_GRADING = Grading(1, -1, 0, 1)
GHOST_GRADING = Grading(1, 1, 0, 0)
BASE_MOMENTUM_GRADING = Grading(1, 1, 1, 0)
ANTIGHOST_MOMENTUM_GRADING = Grading(0, 2, 1, 0)
GHOST_MOMENTUM_GRADING = Grading(0, 0, 1, 1)


def velocity_grading(grading: Grading) -> Grading:
    """Grading of d(phi): opposite parity, ghost lowered by one, form degree one."""
    return Grading(grading.parity + 1, grading.ghost - 1, None, None, 1)


def base_momentum_name(position: int) -> str:
    return f"xs{position + 1}"


def build_multivector_chart(base_names: Sequence[str]) -> Chart:
    """Chart of Pi T*M: base coordinates followed by their odd momenta."""
    variables = [GradedVariable(name, BASE_GRADING, VariableKind.BASE) for name in base_names]
    variables += [GradedVariable(base_momentum_name(i), BASE_MOMENTUM_GRADING, VariableKind.MOMENTUM, name)
                  for i, name in enumerate(base_names)]
    return Chart(variables, ChartLevel.M)


def build_extended_chart(base_names: Sequence[str], n_constraints: int, n_generators: int) -> Chart:
    """Chart of N with auto-generated ghosts eta1.., c1.. and their starred partners."""
    eta = [f"eta{a + 1}" for a in range(n_constraints)]
    ghosts = [f"c{alpha + 1}" for alpha in range(n_generators)]
    variables = [GradedVariable(name, BASE_GRADING, VariableKind.BASE) for name in base_names]
    variables += [GradedVariable(name, ANTIGHOST_GRADING, VariableKind.ANTIGHOST_FIBER) for name in eta]
    variables += [GradedVariable(name, GHOST_GRADING, VariableKind.GHOST_FIBER) for name in ghosts]
    variables += [GradedVariable(base_momentum_name(i), BASE_MOMENTUM_GRADING, VariableKind.MOMENTUM, name)
                  for i, name in enumerate(base_names)]
    variables += [GradedVariable(f"etas{a + 1}", ANTIGHOST_MOMENTUM_GRADING, VariableKind.MOMENTUM, name)
                  for a, name in enumerate(eta)]
    variables += [GradedVariable(f"cs{alpha + 1}", GHOST_MOMENTUM_GRADING, VariableKind.MOMENTUM, name)
                  for alpha, name in enumerate(ghosts)]
    return Chart(variables, ChartLevel.N)


def build_tangent_chart(chart: Chart) -> Chart:
    """Chart of Pi T N: the N variables followed by one velocity per variable, same order."""
    if chart.level is not ChartLevel.N:
        raise ChartError("The odd tangent chart is built over an N-level chart")
    variables = list(chart.variables)
    for var in chart.variables:
        kind = VariableKind.VELOCITY_MOMENTUM if var.kind is VariableKind.MOMENTUM else VariableKind.VELOCITY
        variables.append(GradedVariable(f"d{var.name}", velocity_grading(var.grading), kind, var.name))
    return Chart(variables, ChartLevel.PITN)


def total_grading(gradings: Iterable[Tuple[Grading, int]]) -> Grading:
    result = ZERO_GRADING
    for grading, exponent in gradings:
        result = result + grading.scaled(exponent)
    return result
