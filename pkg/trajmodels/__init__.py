"""
Trajectory performance surrogates, vehicle specifications and the fit-table registry.
"""

from trajmodels.errors import BadBreakpoints, DomainError, MissingRow, SchemaError, TrajectoryModelError
from trajmodels.oracles import spiral_tof, spiral_tof_days
from trajmodels.registry import TrajectoryRegistry, arc_label, load_fit_tables, table_label
from trajmodels.surrogates import (
    AffineLowThrustModel,
    BaseSurrogate,
    HighThrustModel,
    IdentityTransfer,
    PwlModel,
    gto_launch_penalty,
    rocket_mass_ratio,
    sep_final_mass,
    sep_tof,
    surrogate_from_dict,
    validate_breakpoints,
)
from trajmodels.vehicles import CrewVehicleSpec, VehicleSpec

__all__ = [
    'AffineLowThrustModel', 'BadBreakpoints', 'BaseSurrogate', 'CrewVehicleSpec', 'DomainError',
    'HighThrustModel', 'IdentityTransfer', 'MissingRow', 'PwlModel', 'SchemaError',
    'TrajectoryModelError', 'TrajectoryRegistry', 'VehicleSpec', 'spiral_tof', 'spiral_tof_days',
    'arc_label', 'gto_launch_penalty', 'load_fit_tables', 'rocket_mass_ratio', 'sep_final_mass',
    'sep_tof', 'surrogate_from_dict', 'table_label', 'validate_breakpoints',
]
