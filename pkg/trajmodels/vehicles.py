"""
Vehicle specifications for cargo tugs and crew vehicles.
"""

from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

from trajmodels.errors import SchemaError


@dataclass(frozen=True)
class VehicleSpec:
    """
    A tug type and the unit names flying it.

    Masses are in tonnes as tabulated; use the *_kg properties inside the model.
    """

    name: str
    propulsion: str
    dry_mass_t: float
    propellant_capacity_t: float
    isp_s: float
    units: int
    unit_names: Tuple[str, ...] = field(default_factory=tuple)
    power_kw: Optional[float] = None

    def __post_init__(self):
        if self.propulsion not in ('CP', 'SEP'):
            raise SchemaError(f"Vehicle {self.name}: propulsion must be CP or SEP, got {self.propulsion}")
        for label, value in (('dry mass', self.dry_mass_t), ('propellant capacity', self.propellant_capacity_t),
                             ('Isp', self.isp_s), ('unit count', self.units)):
            if value is None or value <= 0:
                raise SchemaError(f"Vehicle {self.name}: {label} must be positive, got {value}")
        if self.propulsion == 'SEP' and (self.power_kw is None or self.power_kw <= 0):
            raise SchemaError(f"Vehicle {self.name}: SEP tugs need a positive power rating")
        if self.unit_names and len(self.unit_names) != self.units:
            raise SchemaError(f"Vehicle {self.name}: {self.units} units but {len(self.unit_names)} names")

    @property
    def dry_mass_kg(self) -> float:
        return self.dry_mass_t * 1000.0

    @property
    def propellant_capacity_kg(self) -> float:
        return self.propellant_capacity_t * 1000.0

    @property
    def fuel_commodity(self) -> str:
        """Chemical tugs burn fHIGH, electric tugs burn fLOW."""
        return 'fHIGH' if self.propulsion == 'CP' else 'fLOW'

    @property
    def sep_type(self) -> Optional[str]:
        """'SEP type N' label used by the low-thrust fit tables."""
        if self.propulsion != 'SEP':
            return None
        return f"SEP type {self.name.split('-')[-1]}"

    def with_overrides(self, **changes) -> 'VehicleSpec':
        """Return a copy with some fields replaced (what-if runs)."""
        return replace(self, **changes)


@dataclass(frozen=True)
class CrewVehicleSpec:
    """
    A crew-phase vehicle: CSM, LM or the expendable upper stage.

    The upper stage has no fixed dry mass; its structure is sized from the
    structural coefficient ε through ε̂ = ε / (1 - ε).
    """

    name: str
    isp_s: float
    fuel_commodity: str
    dry_mass_t: Optional[float] = None
    propellant_capacity_t: Optional[float] = None
    structural_coefficient: Optional[float] = None

    def __post_init__(self):
        if self.isp_s is None or self.isp_s <= 0:
            raise SchemaError(f"Crew vehicle {self.name}: Isp must be positive")
        eps = self.structural_coefficient
        if eps is not None and not 0.0 < eps < 1.0:
            raise SchemaError(f"Crew vehicle {self.name}: structural coefficient must lie in (0, 1)")

    @property
    def eps_hat(self) -> Optional[float]:
        eps = self.structural_coefficient
        return None if eps is None else eps / (1.0 - eps)

    @property
    def dry_mass_kg(self) -> Optional[float]:
        return None if self.dry_mass_t is None else self.dry_mass_t * 1000.0

    @property
    def propellant_capacity_kg(self) -> Optional[float]:
        return None if self.propellant_capacity_t is None else self.propellant_capacity_t * 1000.0

    def with_overrides(self, **changes) -> 'CrewVehicleSpec':
        return replace(self, **changes)
