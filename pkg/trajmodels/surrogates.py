"""
Trajectory performance surrogates.

A surrogate maps the initial mass flowing over an arc to the final mass and the
time of flight. High-thrust arcs use the rocket equation (ratio ¹p, no offset,
constant TOF), low-thrust arcs use fitted affine maps, and any nonlinear curve can
be approximated piecewise linearly. Model-side units are kilograms and days.
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

import config
from trajmodels.errors import BadBreakpoints, DomainError


def rocket_mass_ratio(delta_v_kms: float, isp_s: float, g0: Optional[float] = None) -> float:
    """
    Final-to-initial mass ratio exp(-dv / (g0 * Isp)).

    Args:
        delta_v_kms: Velocity change in km/s (>= 0)
        isp_s: Specific impulse in seconds (> 0)
        g0: Standard gravity in m/s^2. Defaults to config.STANDARD_GRAVITY.

    Returns:
        float: Mass ratio in (0, 1]
    """
    if isp_s is None or isp_s <= 0:
        raise DomainError(f"Isp must be positive, got {isp_s}")
    if delta_v_kms < 0:
        raise DomainError(f"Delta-v must be non-negative, got {delta_v_kms}")
    gravity = config.STANDARD_GRAVITY if g0 is None else g0
    if gravity <= 0:
        raise DomainError(f"Standard gravity must be positive, got {gravity}")
    return math.exp(-delta_v_kms * 1000.0 / (gravity * isp_s))


def gto_launch_penalty(delta_v_kms: float = 2.4554, isp_s: float = 450.0, g0: Optional[float] = None) -> float:
    """Initial-to-final mass ratio of the LEO to GTO transfer behind the 1.74 launch factor."""
    return 1.0 / rocket_mass_ratio(delta_v_kms, isp_s, g0)


def _check_presence(initial_mass: float, vehicle_present: float):
    if vehicle_present not in (0, 1):
        raise DomainError(f"vehicle_present must be 0 or 1, got {vehicle_present}")
    if vehicle_present == 0 and abs(initial_mass) > 0:
        raise DomainError("An absent vehicle cannot carry initial mass")


class BaseSurrogate(ABC):
    """Common interface of all arc surrogates."""

    kind = 'base'

    @property
    def is_affine(self) -> bool:
        return True

    @abstractmethod
    def mass_coefficients(self) -> Tuple[float, float]:
        """Return (¹p, ⁰p in kg) of y⁻ = ¹p·y⁺ + ⁰p·x_vehicle."""

    @abstractmethod
    def time_coefficients(self) -> Optional[Tuple[float, float]]:
        """Return (¹q in days/kg, ⁰q in days), or None without a TOF model."""

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        """Serialize the surrogate parameters."""

    def final_mass(self, initial_mass_kg: float, vehicle_present: float = 1) -> float:
        """Evaluate the final mass in kg."""
        _check_presence(initial_mass_kg, vehicle_present)
        p1, p0 = self.mass_coefficients()
        return p1 * initial_mass_kg + p0 * vehicle_present

    def time_of_flight(self, initial_mass_kg: float, vehicle_present: float = 1) -> float:
        """Evaluate the arc length in days."""
        _check_presence(initial_mass_kg, vehicle_present)
        coefficients = self.time_coefficients()
        if coefficients is None:
            raise DomainError(f"{self.kind} surrogate has no time-of-flight model")
        q1, q0 = coefficients
        return q1 * initial_mass_kg + q0 * vehicle_present


@dataclass(frozen=True)
class IdentityTransfer(BaseSurrogate):
    """No propulsion on the arc: mass is conserved and no time elapses."""

    kind = 'identity'

    def mass_coefficients(self):
        return 1.0, 0.0

    def time_coefficients(self):
        return 0.0, 0.0

    def to_dict(self):
        return {'kind': self.kind}


@dataclass(frozen=True)
class HighThrustModel(BaseSurrogate):
    """Impulsive chemical transfer: rocket-equation ratio and a constant TOF."""

    delta_v_kms: float
    isp_s: float
    tof_days: float = 0.0
    g0: Optional[float] = None

    kind = 'high_thrust'

    def __post_init__(self):
        if self.isp_s <= 0:
            raise DomainError(f"Isp must be positive, got {self.isp_s}")
        if self.delta_v_kms < 0 or self.tof_days < 0:
            raise DomainError("Delta-v and TOF must be non-negative")

    @property
    def ratio(self) -> float:
        return rocket_mass_ratio(self.delta_v_kms, self.isp_s, self.g0)

    def mass_coefficients(self):
        return self.ratio, 0.0

    def time_coefficients(self):
        return 0.0, float(self.tof_days)

    def to_dict(self):
        data = {'kind': self.kind, 'delta_v_kms': self.delta_v_kms, 'isp_s': self.isp_s,
                'tof_days': self.tof_days}
        if self.g0 is not None:
            data['g0'] = self.g0
        return data


@dataclass(frozen=True)
class AffineLowThrustModel(BaseSurrogate):
    """
    Fitted low-thrust transfer in table units.

    y⁻ [t] = ¹p·y⁺ [t] + ⁰p [t]·x_vehicle and TOF [d] = ¹q [d/t]·y⁺ [t] + ⁰q [d]·x_vehicle.
    The fit is only meaningful inside the tug's mass envelope.
    """

    p1: float
    p0_t: float
    q1_days_per_t: Optional[float] = None
    q0_days: Optional[float] = None
    envelope_t: Optional[Tuple[float, float]] = None

    kind = 'affine_low_thrust'

    def __post_init__(self):
        if not 0.0 < self.p1 < 1.0:
            raise DomainError(f"¹p must lie in (0, 1), got {self.p1}")
        if (self.q1_days_per_t is None) != (self.q0_days is None):
            raise DomainError("¹q and ⁰q must be given together")

    def mass_coefficients(self):
        return self.p1, self.p0_t * config.KG_PER_TONNE

    def time_coefficients(self):
        if self.q1_days_per_t is None:
            return None
        return self.q1_days_per_t / config.KG_PER_TONNE, float(self.q0_days)

    def in_envelope(self, initial_mass_t: float) -> bool:
        if self.envelope_t is None:
            return True
        low, high = self.envelope_t
        return low <= initial_mass_t <= high

    def with_time(self, q1_days_per_t: float, q0_days: float) -> 'AffineLowThrustModel':
        """Return a copy carrying a TOF fit."""
        return AffineLowThrustModel(self.p1, self.p0_t, q1_days_per_t, q0_days, self.envelope_t)

    def to_dict(self):
        data = {'kind': self.kind, 'p1': self.p1, 'p0_t': self.p0_t,
                'q1_days_per_t': self.q1_days_per_t, 'q0_days': self.q0_days}
        if self.envelope_t is not None:
            data['envelope_t'] = list(self.envelope_t)
        return data


@dataclass(frozen=True)
class PwlModel(BaseSurrogate):
    """
    Piecewise-linear surrogate sampled at strictly increasing breakpoints (kg).

    final_mass_kg[i] = g(d_i); tof_days[i] = h(d_i) when a TOF curve is known.
    """

    breakpoints_kg: Tuple[float, ...]
    final_mass_kg: Tuple[float, ...]
    tof_days: Optional[Tuple[float, ...]] = None

    kind = 'pwl'

    def __post_init__(self):
        object.__setattr__(self, 'breakpoints_kg', tuple(float(v) for v in self.breakpoints_kg))
        object.__setattr__(self, 'final_mass_kg', tuple(float(v) for v in self.final_mass_kg))
        if self.tof_days is not None:
            object.__setattr__(self, 'tof_days', tuple(float(v) for v in self.tof_days))
        validate_breakpoints(self.breakpoints_kg)
        if len(self.final_mass_kg) != len(self.breakpoints_kg):
            raise BadBreakpoints("final_mass_kg must have one value per breakpoint")
        if self.tof_days is not None and len(self.tof_days) != len(self.breakpoints_kg):
            raise BadBreakpoints("tof_days must have one value per breakpoint")

    @property
    def is_affine(self) -> bool:
        return False

    def mass_coefficients(self):
        raise DomainError("A PWL surrogate has no affine mass coefficients")

    def time_coefficients(self):
        return None

    def _interpolate(self, values, initial_mass_kg, vehicle_present):
        _check_presence(initial_mass_kg, vehicle_present)
        low, high = self.breakpoints_kg[0], self.breakpoints_kg[-1]
        if not low <= initial_mass_kg <= high:
            raise DomainError(f"Initial mass {initial_mass_kg} outside breakpoints [{low}, {high}]")
        return float(np.interp(initial_mass_kg, self.breakpoints_kg, values))

    def final_mass(self, initial_mass_kg, vehicle_present=1):
        return self._interpolate(self.final_mass_kg, initial_mass_kg, vehicle_present)

    def time_of_flight(self, initial_mass_kg, vehicle_present=1):
        if self.tof_days is None:
            raise DomainError("PWL surrogate has no time-of-flight curve")
        return self._interpolate(self.tof_days, initial_mass_kg, vehicle_present)

    def to_dict(self):
        data = {'kind': self.kind, 'breakpoints_kg': list(self.breakpoints_kg),
                'final_mass_kg': list(self.final_mass_kg)}
        if self.tof_days is not None:
            data['tof_days'] = list(self.tof_days)
        return data


def validate_breakpoints(breakpoints) -> Tuple[float, ...]:
    """
    Check that PWL breakpoints are finite, strictly increasing and at least two.

    Returns:
        Tuple[float, ...]: The breakpoints as floats
    """
    values = tuple(float(v) for v in breakpoints)
    if len(values) < 2:
        raise BadBreakpoints(f"Need at least 2 breakpoints, got {len(values)}")
    if not all(math.isfinite(v) for v in values):
        raise BadBreakpoints("Breakpoints must be finite")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise BadBreakpoints(f"Breakpoints must be strictly increasing: {values}")
    return values


def sep_final_mass(model: AffineLowThrustModel, initial_mass_t: float, vehicle_present: int) -> float:
    """
    Final mass of a low-thrust arc in tonnes, y⁻ = ¹p·y⁺ + ⁰p·vehicle_present.

    Args:
        model: Affine low-thrust fit
        initial_mass_t: Initial mass y⁺ in tonnes
        vehicle_present: 1 if the tug flies the arc, 0 otherwise

    Returns:
        float: Final mass in tonnes
    """
    _check_presence(initial_mass_t, vehicle_present)
    return model.p1 * initial_mass_t + model.p0_t * vehicle_present


def sep_tof(model: AffineLowThrustModel, initial_mass_t: float, vehicle_present: int) -> float:
    """
    Time of flight of a low-thrust arc in days, ¹q·y⁺ + ⁰q·vehicle_present.

    Args:
        model: Affine low-thrust fit carrying a TOF fit
        initial_mass_t: Initial mass y⁺ in tonnes
        vehicle_present: 1 if the tug flies the arc, 0 otherwise

    Returns:
        float: Arc length in days
    """
    _check_presence(initial_mass_t, vehicle_present)
    if model.q1_days_per_t is None:
        raise DomainError("Model has no time-of-flight fit")
    return model.q1_days_per_t * initial_mass_t + model.q0_days * vehicle_present


_SURROGATE_KINDS = {
    IdentityTransfer.kind: IdentityTransfer,
    HighThrustModel.kind: HighThrustModel,
    AffineLowThrustModel.kind: AffineLowThrustModel,
    PwlModel.kind: PwlModel,
}


def surrogate_from_dict(data: Dict[str, Any]) -> BaseSurrogate:
    """
    Build a surrogate from its serialized form.

    Raises:
        ValueError: If the kind is unknown
    """
    params = dict(data)
    kind = params.pop('kind', None)
    surrogate_class = _SURROGATE_KINDS.get(kind)
    if surrogate_class is None:
        raise ValueError(f"Unknown surrogate kind: {kind}. Available kinds: {', '.join(_SURROGATE_KINDS)}")
    if surrogate_class is PwlModel:
        return PwlModel(tuple(params['breakpoints_kg']), tuple(params['final_mass_kg']),
                        tuple(params['tof_days']) if params.get('tof_days') is not None else None)
    if surrogate_class is AffineLowThrustModel and params.get('envelope_t') is not None:
        params['envelope_t'] = tuple(params['envelope_t'])
    return surrogate_class(**params)
