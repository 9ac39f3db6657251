"""
Flow plans: per-arc commodity flows of a campaign solution.

A plan lists transport arcs by layer ("13") and holdover runs by the layers
they span ("1 to 3"). Plans are written as JSON or as a CSV with one column
per commodity, read back, mapped onto a campaign network and audited.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

import config
from cislunar.campaign import LEO, GTO, WAY_STATIONS, CampaignInstance
from cislunar.errors import PlanFormatError, UnmappableArc
from milpcore import AuditReport, audit_assignment, mixed_tolerance, transformation_matrix
from netgraph import TransportArc
from simplexbb import SolveResult
from trajmodels import table_label

logger = logging.getLogger(__name__)

PLAN_FORMAT_VERSION = 1
# Flows below this are dropped when a solution is turned into a plan
FLOW_EPS = 1e-6
# A vehicle counts as flying an arc from this flow on
VEHICLE_PRESENT = 0.5

_LABEL_TO_NODE = {'L1': 'EML1', 'L2': 'EML2'}


@dataclass
class ArcFlow:
    """
    One plan row.

    Attributes:
        layer: "e" for a transport arc, "a to b" for a holdover run from layer a to layer b
        origin: Origin node id
        destination: Destination node id (equal to origin for holdovers)
        vehicle: Vehicle flying the arc; None for launches, holdovers or when unknown
        flows: Commodity -> x⁺ value
        tof_days: Arc time of flight, informational
    """

    layer: str
    origin: str
    destination: str
    vehicle: Optional[str] = None
    flows: Dict[str, float] = field(default_factory=dict)
    tof_days: Optional[float] = None

    @property
    def is_holdover(self) -> bool:
        return ' to ' in self.layer

    @property
    def events(self) -> Tuple[int, int]:
        """(first, last) layer; both equal for a transport arc."""
        try:
            if self.is_holdover:
                start, end = (int(part) for part in self.layer.split(' to '))
            else:
                start = end = int(self.layer)
        except ValueError:
            raise PlanFormatError(f"Bad layer field '{self.layer}'") from None
        if start < 1 or end < start or (self.is_holdover and end == start):
            raise PlanFormatError(f"Bad layer range '{self.layer}'")
        return start, end

    def check(self):
        """
        Raises:
            PlanFormatError: Malformed layer field
        """
        _ = self.events

    @property
    def description(self) -> str:
        return f"layer {self.layer} {self.origin} -> {self.destination}" + (f" ({self.vehicle})" if self.vehicle else '')

    def flow(self, commodity: str) -> float:
        return self.flows.get(commodity, 0.0)

    def to_dict(self) -> dict:
        return {'layer': self.layer, 'origin': self.origin, 'destination': self.destination,
                'vehicle': self.vehicle, 'flows': dict(self.flows), 'tof_days': self.tof_days}


@dataclass
class FlowPlan:
    name: str = 'plan'
    objective_kg: Optional[float] = None
    t_cargo_days: Optional[float] = None
    t_crew_days: Optional[float] = None
    layer_durations: Dict[int, float] = field(default_factory=dict)
    arcs: List[ArcFlow] = field(default_factory=list)

    def transport(self) -> List[ArcFlow]:
        return [arc for arc in self.arcs if not arc.is_holdover]

    def holdovers(self) -> List[ArcFlow]:
        return [arc for arc in self.arcs if arc.is_holdover]

    def commodities(self) -> List[str]:
        names = []
        for arc in self.arcs:
            names.extend(name for name in arc.flows if name not in names)
        return names

    def to_dict(self) -> dict:
        return {
            'format_version': PLAN_FORMAT_VERSION,
            'name': self.name,
            'objective_kg': self.objective_kg,
            't_cargo_days': self.t_cargo_days,
            't_crew_days': self.t_crew_days,
            'layer_durations': {str(event): value for event, value in sorted(self.layer_durations.items())},
            'arcs': [arc.to_dict() for arc in self.arcs],
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'FlowPlan':
        if not isinstance(data, dict) or 'arcs' not in data:
            raise PlanFormatError("Plan JSON must be an object with an 'arcs' list")
        version = data.get('format_version', PLAN_FORMAT_VERSION)
        if version != PLAN_FORMAT_VERSION:
            raise PlanFormatError(f"Unsupported plan format_version {version}")
        arcs = []
        for i, row in enumerate(data['arcs']):
            try:
                flows = {str(name): float(value) for name, value in (row.get('flows') or {}).items()}
                arc = ArcFlow(str(row['layer']), row['origin'], row['destination'], row.get('vehicle'), flows,
                              None if row.get('tof_days') is None else float(row['tof_days']))
            except (KeyError, TypeError, ValueError, AttributeError) as e:
                raise PlanFormatError(f"Plan arc #{i + 1} is malformed: {e}") from e
            arc.check()
            arcs.append(arc)
        try:
            durations = {int(event): float(value) for event, value in (data.get('layer_durations') or {}).items()}
        except (TypeError, ValueError) as e:
            raise PlanFormatError(f"Bad layer_durations: {e}") from e
        return cls(data.get('name', 'plan'), data.get('objective_kg'), data.get('t_cargo_days'),
                   data.get('t_crew_days'), durations, arcs)


# Readers and writers

def write_plan_json(plan: FlowPlan, path: str):
    with open(path, 'w') as f:
        json.dump(plan.to_dict(), f, indent=2)
    logger.info(f"Wrote plan with {len(plan.arcs)} arcs to {path}")


def read_plan_json(path: str) -> FlowPlan:
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise PlanFormatError(f"Plan {path} is not valid JSON: {e}") from e
    return FlowPlan.from_dict(data)


def plan_to_frame(plan: FlowPlan, commodities: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """One row per plan arc: layer, arc label, vehicle, one column per commodity, tof."""
    commodities = list(commodities or plan.commodities())
    records = []
    for arc in plan.arcs:
        record = {'layer': arc.layer, 'arc': f"{table_label(arc.origin)} to {table_label(arc.destination)}",
                  'vehicle': arc.vehicle or ''}
        record.update({name: arc.flow(name) for name in commodities})
        record['tof'] = arc.tof_days
        records.append(record)
    return pd.DataFrame.from_records(records, columns=['layer', 'arc', 'vehicle'] + commodities + ['tof'])


def write_plan_csv(plan: FlowPlan, path: str, commodities: Optional[Sequence[str]] = None):
    plan_to_frame(plan, commodities).to_csv(path, index=False)
    logger.info(f"Wrote plan table to {path}")


def _node(label: str) -> str:
    label = label.strip()
    return _LABEL_TO_NODE.get(label, label)


def read_plan_csv(path: str, name: Optional[str] = None) -> FlowPlan:
    """
    Read a plan table. The vehicle column is optional; missing vehicles are
    inferred when the plan is mapped onto a network.
    """
    try:
        frame = pd.read_csv(path, dtype={'layer': str, 'arc': str})
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise PlanFormatError(f"Plan table {path} cannot be parsed: {e}") from e
    missing = {'layer', 'arc'} - set(frame.columns)
    if missing:
        raise PlanFormatError(f"Plan table {path} lacks columns {sorted(missing)}")
    commodities = [c for c in frame.columns if c not in ('layer', 'arc', 'vehicle', 'tof')]

    arcs = []
    for i, row in frame.iterrows():
        parts = str(row['arc']).split(' to ')
        if len(parts) != 2:
            raise PlanFormatError(f"Row {i + 1}: arc '{row['arc']}' is not of the form 'A to B'")
        vehicle = row.get('vehicle')
        vehicle = None if vehicle is None or pd.isna(vehicle) or not str(vehicle).strip() else str(vehicle).strip()
        flows = {}
        for commodity in commodities:
            value = row[commodity]
            if pd.isna(value):
                continue
            try:
                value = float(value)
            except ValueError:
                raise PlanFormatError(f"Row {i + 1}: non-numeric {commodity} value '{value}'") from None
            if value:
                flows[commodity] = value
        tof = row.get('tof')
        arc = ArcFlow(str(row['layer']).strip(), _node(parts[0]), _node(parts[1]), vehicle, flows,
                      None if tof is None or pd.isna(tof) else float(tof))
        arc.check()
        arcs.append(arc)
    return FlowPlan(name or path, arcs=arcs)


def read_plan(path: str) -> FlowPlan:
    """Read a plan from .json or .csv by extension."""
    if path.lower().endswith('.json'):
        return read_plan_json(path)
    if path.lower().endswith('.csv'):
        return read_plan_csv(path)
    raise PlanFormatError(f"Unknown plan file type: {path}")


# Mapping onto a network

def map_transport_arc(row: ArcFlow, instance: CampaignInstance) -> TransportArc:
    """
    Find the network arc of a transport row, inferring the vehicle if needed.

    Raises:
        UnmappableArc: No arc, or several candidates the flows cannot tell apart
    """
    event, _ = row.events
    if event > len(instance.network.layers):
        raise UnmappableArc(row.description, f"layer {event} does not exist")
    candidates = instance.network.find_arcs(row.origin, row.destination, event)
    if row.vehicle is not None:
        candidates = [arc for arc in candidates if arc.vehicle == row.vehicle]
    if not candidates:
        raise UnmappableArc(row.description)
    if len(candidates) == 1:
        return candidates[0]
    flown = [arc for arc in candidates if arc.vehicle is not None and row.flow(arc.vehicle) >= VEHICLE_PRESENT]
    if len(flown) == 1:
        return flown[0]
    if not flown:
        launches = [arc for arc in candidates if arc.is_launch]
        if len(launches) == 1:
            return launches[0]
        raise UnmappableArc(row.description, 'no vehicle flow identifies the arc')
    raise UnmappableArc(row.description, f"ambiguous between vehicles {[arc.vehicle for arc in flown]}")


def _interpolation_weights(breakpoints: Sequence[float], value: float) -> np.ndarray:
    """Convex weights on at most two adjacent breakpoints reproducing value (clipped to the range)."""
    breakpoints = np.asarray(breakpoints, dtype=float)
    value = float(np.clip(value, breakpoints[0], breakpoints[-1]))
    weights = np.zeros(len(breakpoints))
    upper = int(np.searchsorted(breakpoints, value, side='left'))
    if upper == 0 or breakpoints[upper] == value:
        weights[upper] = 1.0
        return weights
    lower = upper - 1
    share = (value - breakpoints[lower]) / (breakpoints[upper] - breakpoints[lower])
    weights[lower], weights[upper] = 1.0 - share, share
    return weights


@dataclass
class PlanAudit:
    """Result of replaying a plan through a campaign model."""

    report: AuditReport
    values: np.ndarray
    objective_kg: float
    layer_durations: Dict[int, float]
    t_cargo_days: float
    t_crew_days: float
    objective_matches: Optional[bool] = None

    @property
    def passed(self) -> bool:
        return self.report.is_feasible and self.objective_matches is not False

    def summary(self) -> dict:
        summary = self.report.summary()
        summary.update({'passed': self.passed, 'objective_kg': self.objective_kg,
                        'objective_matches': self.objective_matches, 't_cargo_days': self.t_cargo_days,
                        't_crew_days': self.t_crew_days})
        return summary


class PlanReplayer:
    """
    Turns a FlowPlan into a full assignment of a campaign model: x⁺ from the plan,
    x⁻ and y± from the arc transformations, layer durations from the arc times.
    """

    def __init__(self, instance: CampaignInstance):
        self.instance = instance
        self.builder = instance.builder
        self.network = instance.network
        self.schema = instance.schema
        self.logger = logging.getLogger(self.__class__.__name__)

    def _set_flows(self, ids: List[int], flows: Dict[str, float], values: np.ndarray, description: str,
                   accumulate: bool = False):
        for commodity, amount in flows.items():
            if commodity not in self.schema:
                raise PlanFormatError(f"Unknown commodity '{commodity}' in {description}")
            var_id = ids[self.schema.index(commodity)]
            values[var_id] = values[var_id] + amount if accumulate else amount

    def _propagate(self, arc: TransportArc, values: np.ndarray):
        builder = self.builder
        plus = np.asarray(builder.flow_plus[arc.name])
        minus = np.asarray(builder.flow_minus[arc.name])
        mass = self.schema.mass_vector
        x_plus = values[plus]
        y_plus = float(mass @ x_plus)
        if arc.is_pwl:
            burn = arc.burns[0]
            surrogate = burn.surrogate
            weights = _interpolation_weights(surrogate.breakpoints_kg, y_plus)
            values[builder.pwl_weights[arc.name]] = weights
            y_minus = float(weights @ np.asarray(surrogate.final_mass_kg))
            x_minus = x_plus.copy()
            k = self.schema.index(burn.propellant)
            x_minus[k] = x_plus[k] - (y_plus - y_minus) / mass[k]
        else:
            x_minus = transformation_matrix(arc, self.schema) @ x_plus
        x_minus = np.maximum(x_minus, 0.0)
        values[minus] = x_minus
        values[builder.mass_plus[arc.name]] = y_plus
        values[builder.mass_minus[arc.name]] = float(mass @ x_minus)
        if arc.name in builder.tof_weights:
            sos = next(s for s in self.builder.model.sos2_sets if s.name == f"sos2_tof__{arc.name}")
            breakpoints = sos.weights
            values[builder.tof_weights[arc.name]] = _interpolation_weights(breakpoints, y_plus)

    def arc_time(self, arc: TransportArc, values: np.ndarray) -> float:
        terms = self.builder.arc_time_terms.get(arc.name, {})
        return float(sum(coef * values[var_id] for var_id, coef in terms.items()))

    def layer_times(self, values: np.ndarray) -> Tuple[Dict[int, float], Dict[str, float]]:
        """Cargo layer durations (longest vehicle) and total crew time per crew vehicle."""
        per_vehicle = {}
        crew = {}
        for arc in self.network.transport_arcs:
            if arc.vehicle is None:
                continue
            elapsed = self.arc_time(arc, values)
            if self.network.layer(arc.event).tag.is_cargo:
                key = (arc.event, arc.vehicle)
                per_vehicle[key] = per_vehicle.get(key, 0.0) + elapsed
            else:
                crew[arc.vehicle] = crew.get(arc.vehicle, 0.0) + elapsed
        durations = {event: 0.0 for event in self.network.cargo_events()}
        for (event, _), elapsed in per_vehicle.items():
            durations[event] = max(durations[event], elapsed)
        return durations, crew

    def assignment(self, plan: FlowPlan) -> np.ndarray:
        model = self.instance.model
        values = np.zeros(len(model.variables))
        mapped = []
        for row in plan.transport():
            arc = map_transport_arc(row, self.instance)
            self._set_flows(self.builder.flow_plus[arc.name], row.flows, values, row.description)
            mapped.append(arc)
        for arc in mapped:
            self._propagate(arc, values)

        for row in plan.holdovers():
            start, end = row.events
            if row.origin != row.destination:
                raise PlanFormatError(f"Holdover {row.description} must stay at one node")
            for event in range(start, end):
                hold = self.network.holdover(row.origin, event)
                if hold is None:
                    raise UnmappableArc(row.description, f"no holdover at {row.origin} after layer {event}")
                self._set_flows(self.builder.hold_plus[hold.name], row.flows, values, row.description, accumulate=True)
                self._set_flows(self.builder.hold_minus[hold.name], row.flows, values, row.description,
                                accumulate=True)

        durations, _ = self.layer_times(values)
        for event, tau in self.builder.tau.items():
            values[tau] = durations.get(event, 0.0)
        return values


def validate_plan(plan: FlowPlan, instance: CampaignInstance,
                  mass_tol: float = config.PlanAuditDefaults.MASS_TOL_KG,
                  discrete_tol: float = config.PlanAuditDefaults.DISCRETE_TOL,
                  objective_tol: float = config.PlanAuditDefaults.OBJECTIVE_TOL_KG) -> PlanAudit:
    """
    Replay a plan through a campaign model and audit every row.

    Args:
        plan: Plan to check
        instance: Campaign built with the plan's assumptions
        mass_tol: Absolute tolerance (kg) on rows with continuous terms
        discrete_tol: Tolerance on rows with only discrete terms
        objective_tol: Allowed distance to the plan's stated objective

    Returns:
        PlanAudit: Audit report, recomputed objective and campaign times

    Raises:
        UnmappableArc, PlanFormatError
    """
    replayer = PlanReplayer(instance)
    values = replayer.assignment(plan)
    model = instance.model
    report = audit_assignment(model, values, tolerance=mixed_tolerance(model, mass_tol, discrete_tol),
                              integrality_tol=discrete_tol)
    durations, crew = replayer.layer_times(values)
    objective = float(model.objective_value(values))
    matches = None
    if plan.objective_kg is not None:
        matches = abs(objective - plan.objective_kg) <= objective_tol
    audit = PlanAudit(report, values, objective, durations, float(sum(durations.values())),
                      max(crew.values(), default=0.0), matches)
    logger.info(f"Plan '{plan.name}': objective {objective:,.0f} kg, T_cargo {audit.t_cargo_days:g} d, "
                f"T_crew {audit.t_crew_days:g} d, {'passed' if audit.passed else 'FAILED'}")
    return audit


# Extraction from a solution

def _nonzero_flows(ids: List[int], x: np.ndarray, names: List[str]) -> Dict[str, float]:
    return {name: float(x[var_id]) for name, var_id in zip(names, ids) if abs(x[var_id]) > FLOW_EPS}


def extract_plan(instance: CampaignInstance, result: SolveResult, name: Optional[str] = None) -> FlowPlan:
    """
    Read the arc flows out of a solution. Consecutive holdovers at a node with
    identical contents are merged into one "a to b" row.
    """
    if not result.has_solution:
        raise ValueError(f"Solve result has no solution (status {result.status})")
    x = np.asarray(result.x, dtype=float)
    builder = instance.builder
    names = instance.schema.names
    replayer = PlanReplayer(instance)

    rows = []
    for arc in instance.network.transport_arcs:
        flows = _nonzero_flows(builder.flow_plus[arc.name], x, names)
        if not flows:
            continue
        rows.append(ArcFlow(str(arc.event), arc.origin, arc.destination, arc.vehicle, flows,
                            None if arc.vehicle is None else replayer.arc_time(arc, x)))

    for node in instance.network.nodes:
        run_start, run_flows = None, None
        for event in range(1, len(instance.network.layers) + 1):
            hold = instance.network.holdover(node, event)
            flows = _nonzero_flows(builder.hold_plus[hold.name], x, names) if hold is not None else {}
            if run_flows is not None and not _same_flows(flows, run_flows):
                rows.append(ArcFlow(f"{run_start} to {event}", node, node, None, run_flows))
                run_start, run_flows = None, None
            if flows and run_flows is None:
                run_start, run_flows = event, flows

    rows.sort(key=lambda row: (row.events[0], row.is_holdover, row.origin, row.destination, row.vehicle or ''))
    durations = {event: float(x[tau]) for event, tau in builder.tau.items()}
    _, crew = replayer.layer_times(x)
    return FlowPlan(name or instance.config.name, result.objective, float(sum(durations.values())),
                    max(crew.values(), default=0.0), durations, rows)


def _same_flows(a: Dict[str, float], b: Dict[str, float], tol: float = 1e-6) -> bool:
    if set(a) != set(b):
        return False
    return all(math.isclose(a[k], b[k], rel_tol=tol, abs_tol=tol) for k in a)


# Campaign statistics

def count_tug_uses(plan: FlowPlan) -> Dict[str, int]:
    """Departures of each tug from the Earth parking orbits towards a way station."""
    uses = {}
    for row in plan.transport():
        if row.origin not in (LEO, GTO) or row.destination not in WAY_STATIONS:
            continue
        for commodity, amount in row.flows.items():
            if commodity.startswith('tug') and amount >= VEHICLE_PRESENT:
                uses[commodity] = uses.get(commodity, 0) + 1
    return dict(sorted(uses.items(), key=lambda item: int(item[0][3:]) if item[0][3:].isdigit() else 0))


def check_monotonicity(points: Iterable, rel_tol: float = config.SolverDefaults.GAP,
                       abs_tol: float = 1.0) -> List[Tuple]:
    """
    Pairs of solved points where looser time bounds gave a worse objective.

    Points need t_cargo, t_crew and objective_kg attributes; points without an
    objective are skipped. A pair (a, b) is reported when a's bounds are both at
    least b's but a's objective exceeds b's by more than the tolerance.
    """
    solved = [p for p in points if p.objective_kg is not None and math.isfinite(p.objective_kg)]
    violations = []
    for a in solved:
        for b in solved:
            if a is b or not (_bound(a.t_cargo) >= _bound(b.t_cargo) and _bound(a.t_crew) >= _bound(b.t_crew)):
                continue
            if a.objective_kg > b.objective_kg + rel_tol * abs(b.objective_kg) + abs_tol:
                violations.append((a, b))
    if violations:
        logger.warning(f"{len(violations)} Pareto points are not monotone in the time bounds")
    return violations


def _bound(value: Optional[float]) -> float:
    return math.inf if value is None else value
