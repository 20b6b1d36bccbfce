"""
Differential forms on the Lagrangian L = {phi* = 0 = dphi*}: the homological
vector fields Q and Q-hat, interior products, Lie derivatives and
Q-hat-closed extensions of forms.
"""
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional

sys.path.append(str(Path(__file__).parent.parent))
from gsys_utils import GsysError
from graded.basis import truncated_basis
from graded.grading import Chart, VariableKind
from graded.superpoly import SuperPolynomial, grading_of, restrict_to_L
from brackets.bracket_engine import (
    RESTRICT_TO_L, derived_bracket, even_bracket, exterior_derivative, lift_by_delta, to_tangent,
)
from cohomology.exact_linear import PolynomialSystem, combine
from gauge.system import GaugeSystemError, GaugeSystemSpec, MasterFunction

logger = logging.getLogger(__name__)


class CartanMismatch(GsysError):
    """The Lie derivative disagrees with d i_V + i_V d; an engine sign error."""


@dataclass
class GradedOperator:
    """A derivation with known grading shifts, applied symbolically."""
    name: str
    chart: Chart
    action: Callable[[SuperPolynomial], SuperPolynomial]
    degree_field: str
    ghost_shift: int = 1
    growth: int = 0

    def __call__(self, F: SuperPolynomial) -> SuperPolynomial:
        return self.action(F)

    def components(self) -> Dict[str, SuperPolynomial]:
        """Images of the coordinates the operator acts on."""
        kinds = (VariableKind.MOMENTUM, VariableKind.VELOCITY_MOMENTUM)
        result = {}
        for var in self.chart.variables:
            if var.kind in kinds:
                continue
            image = self.action(SuperPolynomial.variable(self.chart, var.name))
            if image:
                result[var.name] = image
        return result


def lift_master(S: MasterFunction, spec: GaugeSystemSpec) -> SuperPolynomial:
    """Psi = {Delta, S} on the odd tangent chart."""
    if spec.connection is not None and not spec.connection.is_flat_zero():
        raise GaugeSystemError("The lift to the odd tangent bundle needs trivial bundles (no connection)")
    return lift_by_delta(spec.to_N(S.value), spec.tangent_chart)


def extract_Q(S: MasterFunction, spec: GaugeSystemSpec) -> GradedOperator:
    """Q = (S^1, -); on functions of (x, eta, c) this is (S, -) restricted to M."""
    S1 = spec.to_N(S.value).component('deg', 1)
    return GradedOperator('Q', spec.extended_chart, lambda F: spec.bracket(S1, spec.to_N(F)), 'deg',
                          growth=S1.base_degree())


def extract_Qhat(Psi: SuperPolynomial) -> GradedOperator:
    """Q-hat = {Psi, -} restricted to L."""
    chart = Psi.chart
    return GradedOperator('Qhat', chart, lambda w: restrict_to_L(even_bracket(Psi, to_tangent(w, chart))),
                          'form', growth=Psi.base_degree())


def _on_tangent(poly: SuperPolynomial, spec: Optional[GaugeSystemSpec]) -> SuperPolynomial:
    if spec is not None:
        return to_tangent(spec.to_N(poly), spec.tangent_chart)
    return to_tangent(poly)


def interior_product(X: SuperPolynomial, omega: SuperPolynomial,
                     spec: Optional[GaugeSystemSpec] = None) -> SuperPolynomial:
    """i_X omega = (-1)^{e(X)} {X, omega} restricted to L."""
    X_t = _on_tangent(X, spec)
    omega_t = to_tangent(omega, X_t.chart)
    if not X_t or not omega_t:
        return SuperPolynomial.zero(X_t.chart)
    value = restrict_to_L(even_bracket(X_t, omega_t))
    return -value if X_t.parity() else value


def lie_derivative_form(V: SuperPolynomial, omega: SuperPolynomial,
                        spec: Optional[GaugeSystemSpec] = None) -> SuperPolynomial:
    """
    L_V omega = (-1)^{e(V)} {Gamma, omega} on L with Gamma = {Delta, V},
    cross-checked against d i_V omega - (-1)^{e(V)} i_V d omega.
    """
    V_t = _on_tangent(V, spec)
    omega_t = to_tangent(omega, V_t.chart)
    sign = -1 if V_t.parity() else 1
    Gamma = lift_by_delta(V_t)
    value = restrict_to_L(even_bracket(Gamma, omega_t)).scale(sign)
    cartan = exterior_derivative(interior_product(V_t, omega_t)) \
        - interior_product(V_t, exterior_derivative(omega_t)).scale(sign)
    if value != cartan:
        raise CartanMismatch(f"L_V omega = {value.to_text()} but d i_V + i_V d gives {cartan.to_text()}")
    return value


def commutator_correction(V: SuperPolynomial, X: SuperPolynomial, omega: SuperPolynomial,
                          spec: Optional[GaugeSystemSpec] = None) -> SuperPolynomial:
    """(-1)^{e(X)+e(V)} {{Gamma, X}, omega} on L: the defect of L_V commuting with i_X."""
    V_t = _on_tangent(V, spec)
    X_t = to_tangent(_on_tangent(X, spec), V_t.chart)
    omega_t = to_tangent(omega, V_t.chart)
    value = restrict_to_L(even_bracket(even_bracket(lift_by_delta(V_t), X_t), omega_t))
    return -value if (V_t.parity() + X_t.parity()) % 2 else value


def weak_koszul_bracket(Psi: SuperPolynomial, omega: SuperPolynomial, tau: SuperPolynomial) -> SuperPolynomial:
    """Binary derived bracket {{Psi, omega}, tau} on L."""
    return derived_bracket(Psi, [omega, tau], RESTRICT_TO_L)


@dataclass
class FormExtension:
    form: Optional[SuperPolynomial]
    kernel_dimension: int = 0
    basis_size: int = 0
    already_closed: bool = False

    @property
    def found(self) -> bool:
        return self.form is not None


GHOST_SECTOR = (VariableKind.GHOST_FIBER, VariableKind.ANTIGHOST_FIBER)


def _ghost_sector_indices(chart: Chart) -> set:
    names = set()
    for var in chart.variables:
        if var.kind in GHOST_SECTOR:
            names.add(chart.index(var.name))
        elif var.kind is VariableKind.VELOCITY and chart.variable(var.partner).kind in GHOST_SECTOR:
            names.add(chart.index(var.name))
    return names


def extend_form(omega0: SuperPolynomial, Psi: SuperPolynomial, coeff_degree_bound: int) -> FormExtension:
    """
    omega0 + X with Q-hat(omega0 + X) = 0, X built from monomials that contain
    a ghost-sector variable (eta, c, d eta, dc). Reports the dimension of the
    Q-hat-closed part of that space, which measures the non-uniqueness.
    """
    Qhat = extract_Qhat(Psi)
    chart = Psi.chart
    omega0 = to_tangent(omega0, chart)
    if not omega0:
        return FormExtension(omega0, already_closed=True)
    target = -Qhat(omega0)
    form_degree, ghost = grading_of(omega0, 'form'), grading_of(omega0, 'ghost')
    ghost_sector = _ghost_sector_indices(chart)
    fibers = [v.name for v in chart.variables
              if v.kind in GHOST_SECTOR + (VariableKind.VELOCITY,)]
    basis = truncated_basis(chart, fibers, {'form': form_degree, 'ghost': ghost, 'parity': omega0.parity()},
                            coeff_degree_bound, even_cap=form_degree + 2,
                            keep=lambda key: any(i in ghost_sector for i, _ in key))
    system = PolynomialSystem([Qhat(b) for b in basis])
    kernel_dimension = len(system.kernel()) if basis else 0
    if not target:
        return FormExtension(omega0, kernel_dimension, len(basis), already_closed=True)
    weights = system.solve(target) if basis else None
    if weights is None:
        return FormExtension(None, kernel_dimension, len(basis))
    return FormExtension(omega0 + combine(chart, basis, weights), kernel_dimension, len(basis))
