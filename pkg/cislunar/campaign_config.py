"""
CampaignConfig: one case-study run read from JSON.
"""

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Dict, List, Optional

import config
from cislunar.errors import ConfigError
from simplexbb import BranchAndBoundOptions

logger = logging.getLogger(__name__)


@dataclass
class SolverSettings:
    gap: float = config.SolverDefaults.GAP
    time_limit: Optional[float] = config.SolverDefaults.TIME_LIMIT
    node_limit: Optional[int] = config.SolverDefaults.NODE_LIMIT
    threads: int = config.SolverDefaults.THREADS

    def to_options(self, show_progress: bool = False) -> BranchAndBoundOptions:
        return BranchAndBoundOptions(gap=self.gap, time_limit=self.time_limit, node_limit=self.node_limit,
                                     threads=self.threads, show_progress=show_progress)

    def merged(self, **overrides) -> 'SolverSettings':
        """Copy with every non-None override applied (CLI flags win over JSON)."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


@dataclass
class CampaignConfig:
    """
    Attributes:
        name: Run label used in reports
        t_cargo_days: Budget on the summed cargo layer durations (None = unbounded)
        t_crew_days: Budget on total crew flight time (None = unbounded)
        missions: Number of crew missions (two layers each)
        tug_reuse_limit: Cargo layer repetitions, i.e. uses per tug
        enabled_tugs: Tug units available to the campaign (None = the whole fleet)
        flm_demand_per_mission_kg: LM propellant demanded at LLO per mission
        standard_gravity: Override of g for the high-thrust models (m/s^2)
        vehicle_overrides: Per vehicle type or tug unit field replacements
        policies: Concurrency policy names applied to the model
        solver: Solver settings
    """

    name: str = 'campaign'
    t_cargo_days: Optional[float] = 0.0
    t_crew_days: Optional[float] = 21.0
    missions: int = config.CampaignDefaults.MISSIONS
    tug_reuse_limit: int = config.CampaignDefaults.TUG_REUSE_LIMIT
    enabled_tugs: Optional[List[str]] = None
    flm_demand_per_mission_kg: float = config.CampaignDefaults.FLM_DEMAND_PER_MISSION_KG
    standard_gravity: Optional[float] = None
    vehicle_overrides: Dict[str, Dict[str, float]] = field(default_factory=dict)
    policies: List[str] = field(default_factory=lambda: list(config.CampaignDefaults.POLICIES))
    solver: SolverSettings = field(default_factory=SolverSettings)

    def __post_init__(self):
        self.validate()

    def validate(self):
        """
        Raises:
            ConfigError: On values no campaign can be built from
        """
        if self.t_cargo_days is not None and self.t_cargo_days < 0:
            raise ConfigError(f"t_cargo_days must be >= 0, got {self.t_cargo_days}")
        if self.t_crew_days is not None and self.t_crew_days < 0:
            raise ConfigError(f"t_crew_days must be >= 0, got {self.t_crew_days}")
        if self.missions < 0:
            raise ConfigError(f"missions must be >= 0, got {self.missions}")
        if self.tug_reuse_limit < 1:
            raise ConfigError(f"tug_reuse_limit must be >= 1, got {self.tug_reuse_limit}")
        if self.flm_demand_per_mission_kg < 0:
            raise ConfigError("flm_demand_per_mission_kg must be >= 0")
        if self.standard_gravity is not None and self.standard_gravity <= 0:
            raise ConfigError("standard_gravity must be positive")
        if self.solver.gap < 0:
            raise ConfigError("solver.gap must be >= 0")
        if self.solver.threads < 1:
            raise ConfigError("solver.threads must be >= 1")

        minimum = config.CampaignDefaults.MIN_CREW_DAYS_PER_MISSION * self.missions
        if self.missions and self.t_crew_days is not None and self.t_crew_days < minimum:
            logger.warning(f"T_crew = {self.t_crew_days} d is below {minimum:g} d for {self.missions} direct "
                           f"missions; the campaign will be infeasible")

    @property
    def cargo_layers(self) -> int:
        return 4 * self.tug_reuse_limit

    @property
    def layer_count(self) -> int:
        return self.cargo_layers + 2 * self.missions

    def with_bounds(self, t_cargo: Optional[float], t_crew: Optional[float]) -> 'CampaignConfig':
        return replace(self, t_cargo_days=t_cargo, t_crew_days=t_crew,
                       name=f"{self.name}@{_fmt(t_cargo)}x{_fmt(t_crew)}")

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['solver'] = asdict(self.solver)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'CampaignConfig':
        """
        Raises:
            ConfigError: Unknown keys or wrong value types
        """
        if not isinstance(data, dict):
            raise ConfigError("Campaign config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"Unknown campaign config keys: {unknown}")
        values = dict(data)
        solver = values.pop('solver', None) or {}
        if not isinstance(solver, dict):
            raise ConfigError("'solver' must be an object")
        solver_known = {f.name for f in fields(SolverSettings)}
        if set(solver) - solver_known:
            raise ConfigError(f"Unknown solver keys: {sorted(set(solver) - solver_known)}")
        try:
            return cls(solver=SolverSettings(**solver), **values)
        except TypeError as e:
            raise ConfigError(f"Invalid campaign config: {e}") from e

    @classmethod
    def load(cls, path: str) -> 'CampaignConfig':
        try:
            with open(path, 'r') as f:
                data = json.load(f)
        except FileNotFoundError:
            raise ConfigError(f"Campaign config not found: {path}") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"Campaign config {path} is not valid JSON: {e}") from e
        campaign = cls.from_dict(data)
        logger.info(f"Loaded campaign config '{campaign.name}' from {path}")
        return campaign

    def dump(self, path: str):
        with open(path, 'w') as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)

    def fingerprint(self) -> str:
        """SHA-256 of the canonical JSON form, excluding the name and thread count."""
        data = self.to_dict()
        data.pop('name')
        data['solver'].pop('threads')
        return hashlib.sha256(json.dumps(data, sort_keys=True).encode('utf-8')).hexdigest()


def _fmt(value: Optional[float]) -> str:
    return 'inf' if value is None else f"{value:g}"
