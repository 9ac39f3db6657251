"""
Cost versus time Pareto sweep over a grid of (T_cargo, T_crew) bounds.
"""

import concurrent.futures
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from tqdm import tqdm

import config
from cache_config import cached_solution, solution_cache_key
from cislunar.campaign import assemble_campaign, load_registry
from cislunar.campaign_config import CampaignConfig
from cislunar.plan import check_monotonicity, count_tug_uses, extract_plan
from simplexbb import solve_milp
from trajmodels import TrajectoryRegistry

logger = logging.getLogger(__name__)

ERROR = 'error'


@dataclass
class SweepPoint:
    """Outcome of one grid point; plan is the FlowPlan dict of the best solution found."""

    t_cargo: Optional[float]
    t_crew: Optional[float]
    status: str
    objective_kg: Optional[float] = None
    gap: Optional[float] = None
    nodes: int = 0
    wall_time: float = 0.0
    tugs_used: int = 0
    tug_uses: Dict[str, int] = field(default_factory=dict)
    savings_pct: Optional[float] = None
    message: str = ''
    cached: bool = False
    plan: Optional[dict] = None

    @property
    def bounds(self) -> Tuple[Optional[float], Optional[float]]:
        return self.t_cargo, self.t_crew

    @property
    def solved(self) -> bool:
        return self.objective_kg is not None and math.isfinite(self.objective_kg)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> 'SweepPoint':
        return cls(**data)


def default_grid() -> List[Tuple[float, float]]:
    return config.SweepGrid.points()


def baseline_bounds(campaign: CampaignConfig) -> Tuple[float, float]:
    """No cargo time and the shortest crew schedule: direct flights only."""
    return 0.0, config.CampaignDefaults.MIN_CREW_DAYS_PER_MISSION * campaign.missions


def _point_key(campaign: CampaignConfig, t_cargo, t_crew, registry: TrajectoryRegistry) -> str:
    solver = campaign.solver
    return solution_cache_key('sweep_point', campaign.fingerprint(), [t_cargo, t_crew],
                              {'gap': solver.gap, 'time_limit': solver.time_limit, 'node_limit': solver.node_limit},
                              registry.checksums)


def solve_point(campaign: CampaignConfig, t_cargo: Optional[float], t_crew: Optional[float],
                registry: TrajectoryRegistry) -> SweepPoint:
    """
    Build and solve the campaign at one grid point.

    Failures are returned as a point with status 'error' rather than raised.
    """
    started = time.perf_counter()
    try:
        instance = assemble_campaign(campaign.with_bounds(t_cargo, t_crew), registry)
        result = solve_milp(instance.model, campaign.solver.to_options())
        point = SweepPoint(t_cargo, t_crew, result.status, nodes=result.nodes, message=result.message)
        if result.has_solution:
            plan = extract_plan(instance, result)
            uses = count_tug_uses(plan)
            point.objective_kg = float(result.objective)
            point.gap = None if not math.isfinite(result.gap) else float(result.gap)
            point.tug_uses = uses
            point.tugs_used = len(uses)
            point.plan = plan.to_dict()
    except Exception as e:
        logger.error(f"Sweep point ({t_cargo}, {t_crew}) failed: {e}")
        point = SweepPoint(t_cargo, t_crew, ERROR, message=str(e))
    point.wall_time = time.perf_counter() - started
    logger.info(f"Point T_cargo={t_cargo}, T_crew={t_crew}: {point.status}"
                + (f", objective {point.objective_kg:,.0f} kg" if point.solved else ''))
    return point


def _run_point(campaign, t_cargo, t_crew, registry, use_cache) -> SweepPoint:
    key = _point_key(campaign, t_cargo, t_crew, registry)

    data, hit = cached_solution(key, lambda: solve_point(campaign, t_cargo, t_crew, registry).to_dict(), use_cache,
                                store_if=lambda value: value["status"] != ERROR)
    point = SweepPoint.from_dict(data)
    point.cached = hit
    return point


def pareto_sweep(campaign: CampaignConfig, grid: Optional[Sequence[Tuple[float, float]]] = None,
                 registry: Optional[TrajectoryRegistry] = None, workers: int = 1, use_cache: bool = True,
                 show_progress: bool = False) -> List[SweepPoint]:
    """
    Solve every (T_cargo, T_crew) grid point and rate it against the baseline.

    Args:
        campaign: Campaign configuration; its own time bounds are ignored
        grid: (T_cargo, T_crew) pairs in days. Defaults to config.SweepGrid.
        registry: Loaded fit tables (loaded from the campaign's settings if omitted)
        workers: Points solved concurrently
        use_cache: Reuse and store point results in the solution cache
        show_progress: Show a tqdm bar over the points

    Returns:
        List[SweepPoint]: One point per distinct grid pair, sorted by (T_crew, T_cargo)

    Raises:
        ValueError: Empty grid
    """
    grid = list(dict.fromkeys((t_cargo, t_crew) for t_cargo, t_crew in (default_grid() if grid is None else grid)))
    if not grid:
        raise ValueError("The sweep grid is empty")
    registry = registry or load_registry(campaign)
    baseline = baseline_bounds(campaign)
    jobs = grid if baseline in grid else grid + [baseline]
    logger.info(f"Sweeping {len(grid)} grid points with {workers} worker(s)")

    points = {}
    with tqdm(total=len(jobs), desc="Pareto sweep", unit="point", disable=not show_progress) as progress:
        if workers <= 1:
            for t_cargo, t_crew in jobs:
                points[(t_cargo, t_crew)] = _run_point(campaign, t_cargo, t_crew, registry, use_cache)
                progress.update(1)
        else:
            with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
                futures = {executor.submit(_run_point, campaign, t_cargo, t_crew, registry, use_cache): (t_cargo, t_crew)
                           for t_cargo, t_crew in jobs}
                for future in concurrent.futures.as_completed(futures):
                    points[futures[future]] = future.result()
                    progress.update(1)

    reference = points[baseline]
    result = [points[bounds] for bounds in grid]
    rate_savings(result, reference)
    result.sort(key=lambda p: (_order(p.t_crew), _order(p.t_cargo)))

    violations = check_monotonicity(result, rel_tol=max(campaign.solver.gap, 1e-9))
    for looser, tighter in violations:
        logger.warning(f"Objective at {looser.bounds} ({looser.objective_kg:,.0f} kg) exceeds the tighter "
                       f"{tighter.bounds} ({tighter.objective_kg:,.0f} kg)")
    failed = sum(1 for p in result if p.status == ERROR)
    logger.info(f"Sweep finished: {len(result) - failed} points completed, {failed} errors")
    return result


def rate_savings(points: Iterable[SweepPoint], baseline: SweepPoint):
    """savings_pct = 100 * (baseline - objective) / baseline for every solved point."""
    if not baseline.solved or baseline.objective_kg <= 0:
        logger.warning("Baseline point has no positive objective; savings are not rated")
        return
    for point in points:
        if point.solved:
            point.savings_pct = 100.0 * (baseline.objective_kg - point.objective_kg) / baseline.objective_kg


def _order(value: Optional[float]) -> float:
    return math.inf if value is None else float(value)
