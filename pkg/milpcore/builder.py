"""
Formulation of the event-driven multi-commodity flow MILP.

Variables (per transport arc: x⁺, x⁻ for every commodity plus y⁺, y⁻; per holdover
arc: x⁺, x⁻; per cargo layer: τ̃_e) and the row families mass balance,
transformation, total mass, concurrency, time and objective.
"""

import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from milpcore.errors import MissingSurrogate, MissingTofModel, ModelError
from milpcore.model import LinearConstraint, MilpModel, Provenance, Relation, VarKind
from netgraph.network import DemandTable, EventNetwork, HoldoverArc, TransportArc
from netgraph.schema import CommodityKind, CommoditySchema
from trajmodels.errors import BadBreakpoints
from trajmodels.surrogates import PwlModel, validate_breakpoints

logger = logging.getLogger(__name__)

# Slack on the constant-TOF bound fixing, in days
TIME_FIX_TOL = 1e-9


def transformation_matrix(arc: TransportArc, schema: CommoditySchema) -> np.ndarray:
    """
    Composed linear map x⁻ = B·x⁺ of an affine arc.

    Each burn is the identity except for its propellant row, which loses
    (1 - ¹p)·m_c per unit of every commodity still carried and gains ⁰p per
    vehicle unit. Stages are chained by multiplying their matrices.

    Args:
        arc: Transport arc with affine burns (none means identity)
        schema: Commodity schema

    Returns:
        np.ndarray: k x k matrix B
    """
    k = len(schema)
    mass = schema.mass_vector
    carried = schema.mask(arc.allowed_commodities) if arc.allowed_commodities is not None else np.ones(k, dtype=bool)
    B = np.eye(k)
    for burn in arc.burns:
        if not burn.surrogate.is_affine:
            raise ModelError(f"Arc {arc.name} has a non-affine surrogate; it has no transformation matrix")
        p1, p0 = burn.surrogate.mass_coefficients()
        stage = np.eye(k)
        row = schema.index(burn.propellant)
        stage[row, carried] += (p1 - 1.0) * mass[carried]
        if p0:
            if arc.vehicle is None:
                raise ModelError(f"Arc {arc.name} has an offset ⁰p but no vehicle")
            stage[row, schema.index(arc.vehicle)] += p0
        B = stage @ B
        if burn.jettison:
            carried = carried.copy()
            carried[schema.indices(burn.jettison)] = False
    return B


@dataclass
class FlowVariableBlock:
    transport_arcs: int
    holdover_arcs: int
    flow_variables: int
    mass_variables: int
    duration_variables: int


@dataclass
class PwlTofBlock:
    weights: List[int]
    time_terms: Dict[int, float]


class NetworkMilpBuilder:
    """
    Assemble a MilpModel from an EventNetwork.

    Call add_flow_variables first; the emit_* steps may then run in any order.
    build() runs the whole sequence and freezes the model.
    """

    def __init__(self, network: EventNetwork, name: str = 'event_network'):
        self.network = network
        self.schema = network.schema
        self.model = MilpModel(name)
        self.logger = logging.getLogger(self.__class__.__name__)

        self.flow_plus: Dict[str, List[int]] = {}
        self.flow_minus: Dict[str, List[int]] = {}
        self.hold_plus: Dict[str, List[int]] = {}
        self.hold_minus: Dict[str, List[int]] = {}
        self.mass_plus: Dict[str, int] = {}
        self.mass_minus: Dict[str, int] = {}
        self.tau: Dict[int, int] = {}
        self.pwl_weights: Dict[str, List[int]] = {}
        self.tof_weights: Dict[str, List[int]] = {}
        self.arc_time_terms: Dict[str, Dict[int, float]] = {}
        self.time_fixed: List[str] = []

    # Variable lookup helpers used by the concurrency policies and plan replay

    def flow_id(self, arc: TransportArc, commodity: str, minus: bool = False) -> int:
        ids = self.flow_minus if minus else self.flow_plus
        return ids[arc.name][self.schema.index(commodity)]

    def hold_id(self, hold: HoldoverArc, commodity: str, minus: bool = False) -> int:
        ids = self.hold_minus if minus else self.hold_plus
        return ids[hold.name][self.schema.index(commodity)]

    def fix_zero(self, var_id: int):
        self.model.set_bounds(var_id, lower=0.0, upper=0.0)

    def _kind(self, kind: CommodityKind) -> VarKind:
        if kind is CommodityKind.BINARY:
            return VarKind.BINARY
        if kind is CommodityKind.INTEGER:
            return VarKind.INTEGER
        return VarKind.CONTINUOUS

    def add_flow_variables(self) -> FlowVariableBlock:
        """
        Create x⁺/x⁻ per commodity on every arc, y± on transport arcs and τ̃_e per cargo layer.

        All bounds start at [0, inf); vehicle entries take the schema kind (binary per unit).
        """
        model = self.model
        kinds = [self._kind(c.kind) for c in self.schema]
        names = self.schema.names

        def block(prefix, owner, provenance):
            return [model.add_variable(f"{prefix}__{owner}__{name}", kinds[k], provenance=provenance,
                                       arc=owner, commodity=name)
                    for k, name in enumerate(names)]

        for arc in self.network.transport_arcs:
            self.flow_plus[arc.name] = block('xp', arc.name, Provenance.FLOW_PLUS)
            self.flow_minus[arc.name] = block('xm', arc.name, Provenance.FLOW_MINUS)
            self.mass_plus[arc.name] = model.add_variable(f"yp__{arc.name}", provenance=Provenance.MASS_PLUS,
                                                          arc=arc.name)
            self.mass_minus[arc.name] = model.add_variable(f"ym__{arc.name}", provenance=Provenance.MASS_MINUS,
                                                           arc=arc.name)
        for hold in self.network.holdover_arcs:
            self.hold_plus[hold.name] = block('hp', hold.name, Provenance.HOLD_PLUS)
            self.hold_minus[hold.name] = block('hm', hold.name, Provenance.HOLD_MINUS)
        for event in self.network.cargo_events():
            self.tau[event] = model.add_variable(f"tau__{event}", provenance=Provenance.LAYER_DURATION)

        result = FlowVariableBlock(
            transport_arcs=len(self.network.transport_arcs),
            holdover_arcs=len(self.network.holdover_arcs),
            flow_variables=2 * len(names) * (len(self.network.transport_arcs) + len(self.network.holdover_arcs)),
            mass_variables=2 * len(self.network.transport_arcs),
            duration_variables=len(self.tau),
        )
        self.logger.debug(f"Flow variables: {result}")
        return result

    def emit_mass_balance(self, demands: Optional[DemandTable] = None) -> List[LinearConstraint]:
        """
        One ≤ row per (node, event, commodity):
        outflow + holdover-out - inflow - holdover-in(e-1) ≤ d.

        Rows with infinite supply and rows without terms but a nonnegative rhs are skipped.
        """
        demands = demands or DemandTable()
        rows = []
        for layer in self.network.layers:
            event = layer.index
            for node in self.network.nodes:
                out_arcs = self.network.outgoing(node, event)
                in_arcs = self.network.incoming(node, event)
                hold_out = self.network.holdover(node, event)
                hold_in = self.network.holdover(node, event - 1)
                for k, name in enumerate(self.schema.names):
                    rhs = demands.value(node, event, name)
                    if math.isinf(rhs) and rhs > 0:
                        continue
                    terms = [(self.flow_plus[arc.name][k], 1.0) for arc in out_arcs]
                    terms += [(self.flow_minus[arc.name][k], -1.0) for arc in in_arcs]
                    if hold_out is not None:
                        terms.append((self.hold_plus[hold_out.name][k], 1.0))
                    if hold_in is not None:
                        terms.append((self.hold_minus[hold_in.name][k], -1.0))
                    if not terms and rhs >= 0:
                        continue
                    rows.append(self.model.add_constraint(f"balance__{node}__{event}__{name}", terms,
                                                          Relation.LE, rhs, tag='mass_balance'))
        self.logger.debug(f"Mass balance rows: {len(rows)}")
        return rows

    def emit_transformation(self) -> List[LinearConstraint]:
        """
        x⁻ = B·x⁺ on affine arcs, the SOS2 convex-combination block on PWL arcs,
        identity on holdovers, and the total-mass definitions y± = Σ m·x±.
        """
        rows = []
        mass = self.schema.mass_vector
        names = self.schema.names
        for arc in self.network.transport_arcs:
            if arc.vehicle is not None and not arc.burns:
                raise MissingSurrogate(arc.name)
            plus, minus = self.flow_plus[arc.name], self.flow_minus[arc.name]
            if arc.is_pwl:
                rows.extend(self._emit_pwl_transformation(arc))
            else:
                B = transformation_matrix(arc, self.schema)
                for k, name in enumerate(names):
                    terms = [(minus[k], 1.0)] + [(plus[j], -B[k, j]) for j in np.flatnonzero(B[k])]
                    rows.append(self.model.add_constraint(f"xform__{arc.name}__{name}", terms, Relation.EQ, 0.0,
                                                          tag='transformation'))
            rows.append(self.model.add_constraint(
                f"mass_plus__{arc.name}", [(self.mass_plus[arc.name], 1.0)] + [(plus[k], -mass[k]) for k in range(len(names))],
                Relation.EQ, 0.0, tag='total_mass'))
            rows.append(self.model.add_constraint(
                f"mass_minus__{arc.name}", [(self.mass_minus[arc.name], 1.0)] + [(minus[k], -mass[k]) for k in range(len(names))],
                Relation.EQ, 0.0, tag='total_mass'))

        for hold in self.network.holdover_arcs:
            plus, minus = self.hold_plus[hold.name], self.hold_minus[hold.name]
            for k, name in enumerate(names):
                rows.append(self.model.add_constraint(f"hold__{hold.name}__{name}", [(minus[k], 1.0), (plus[k], -1.0)],
                                                      Relation.EQ, 0.0, tag='holdover'))
        self.logger.debug(f"Transformation rows: {len(rows)}")
        return rows

    def _emit_pwl_transformation(self, arc: TransportArc) -> List[LinearConstraint]:
        if len(arc.burns) != 1:
            raise ModelError(f"PWL arc {arc.name} must have exactly one burn")
        burn = arc.burns[0]
        surrogate: PwlModel = burn.surrogate
        propellant = self.schema.index(burn.propellant)
        weights = [self.model.add_variable(f"lam__{arc.name}__{i + 1}", VarKind.CONTINUOUS, 0.0, 1.0,
                                           Provenance.SOS2_WEIGHT, arc=arc.name)
                   for i in range(len(surrogate.breakpoints_kg))]
        self.pwl_weights[arc.name] = weights
        model = self.model
        rows = [
            model.add_constraint(f"pwl_sum__{arc.name}", [(w, 1.0) for w in weights], Relation.EQ, 1.0, tag='pwl'),
            model.add_constraint(f"pwl_in__{arc.name}",
                                 [(w, d) for w, d in zip(weights, surrogate.breakpoints_kg)]
                                 + [(self.mass_plus[arc.name], -1.0)], Relation.EQ, 0.0, tag='pwl'),
            model.add_constraint(f"pwl_out__{arc.name}",
                                 [(w, g) for w, g in zip(weights, surrogate.final_mass_kg)]
                                 + [(self.mass_minus[arc.name], -1.0)], Relation.EQ, 0.0, tag='pwl'),
        ]
        model.add_sos2(f"sos2__{arc.name}", weights, surrogate.breakpoints_kg)
        plus, minus = self.flow_plus[arc.name], self.flow_minus[arc.name]
        for k, name in enumerate(self.schema.names):
            if k == propellant:
                continue
            rows.append(model.add_constraint(f"xform__{arc.name}__{name}", [(minus[k], 1.0), (plus[k], -1.0)],
                                             Relation.EQ, 0.0, tag='transformation'))
        return rows

    def attach_pwl_tof(self, arc: Union[TransportArc, str], breakpoints: Sequence[float],
                       values: Sequence[float]) -> PwlTofBlock:
        """
        Piecewise-linear arc length: λ′ with Σλ′ = 1, Σλ′·d = y⁺ and Δt = Σλ′·h.

        The Δt expression replaces the affine arc length in the time rows.

        Raises:
            BadBreakpoints: Breakpoints not strictly increasing, fewer than two,
                or a value count that does not match
        """
        name = arc if isinstance(arc, str) else arc.name
        breakpoints = validate_breakpoints(breakpoints)
        values = [float(v) for v in values]
        if len(values) != len(breakpoints):
            raise BadBreakpoints(f"{len(breakpoints)} breakpoints but {len(values)} TOF values")
        if name not in self.mass_plus:
            raise ModelError(f"Unknown transport arc {name}")
        weights = [self.model.add_variable(f"lamt__{name}__{i + 1}", VarKind.CONTINUOUS, 0.0, 1.0,
                                           Provenance.TOF_WEIGHT, arc=name)
                   for i in range(len(breakpoints))]
        self.model.add_constraint(f"pwl_tof_sum__{name}", [(w, 1.0) for w in weights], Relation.EQ, 1.0,
                                  tag='pwl_tof')
        self.model.add_constraint(f"pwl_tof_in__{name}", [(w, d) for w, d in zip(weights, breakpoints)]
                                  + [(self.mass_plus[name], -1.0)], Relation.EQ, 0.0, tag='pwl_tof')
        self.model.add_sos2(f"sos2_tof__{name}", weights, breakpoints)
        self.tof_weights[name] = weights
        terms = {w: h for w, h in zip(weights, values) if h}
        self.arc_time_terms[name] = terms
        return PwlTofBlock(weights, terms)

    def emit_concurrency(self, policies: Sequence) -> int:
        """
        Apply concurrency policies (rows and zero bounds).

        Returns:
            int: Number of rows and bound fixings emitted
        """
        total = 0
        for policy in policies:
            count = policy.apply(self)
            self.logger.debug(f"Policy {policy.name}: {count} rows/bounds")
            total += count
        return total

    def _arc_time_terms(self, arc: TransportArc) -> Tuple[Dict[int, float], float]:
        if arc.name in self.arc_time_terms:
            return self.arc_time_terms[arc.name], 0.0
        curve = arc.time_pwl()
        if curve is not None:
            block = self.attach_pwl_tof(arc, curve.breakpoints_kg, curve.tof_days)
            return block.time_terms, 0.0
        coefficients = arc.time_coefficients()
        if coefficients is None:
            raise MissingTofModel(arc.name)
        q1, q0 = coefficients
        terms = {}
        if q1:
            terms[self.mass_plus[arc.name]] = q1
        if q0:
            terms[self.flow_id(arc, arc.vehicle)] = q0
        self.arc_time_terms[arc.name] = terms
        return terms, q0

    def emit_time_constraints(self, t_cargo: Optional[float] = None,
                              t_crew: Optional[float] = None) -> List[LinearConstraint]:
        """
        Layer durations and campaign time budgets.

        Per cargo layer e and vehicle v: Σ(¹q·y⁺ + ⁰q·x_v) - τ̃_e ≤ 0, then Σ τ̃_e ≤ T_cargo.
        Per crew vehicle: Σ over crew layers ⁰q·x_v ≤ T_crew. A vehicle arc whose constant
        TOF alone exceeds its budget gets the vehicle flow fixed to zero. None means no budget.
        """
        rows = []
        cargo_terms = defaultdict(lambda: defaultdict(float))
        crew_terms = defaultdict(lambda: defaultdict(float))
        for arc in self.network.transport_arcs:
            if arc.vehicle is None:
                continue
            terms, q0 = self._arc_time_terms(arc)
            is_cargo = self.network.layer(arc.event).tag.is_cargo
            budget = t_cargo if is_cargo else t_crew
            if budget is not None and q0 > budget + TIME_FIX_TOL:
                self.fix_zero(self.flow_id(arc, arc.vehicle))
                self.time_fixed.append(arc.name)
            target = cargo_terms[(arc.event, arc.vehicle)] if is_cargo else crew_terms[arc.vehicle]
            for var_id, coef in terms.items():
                target[var_id] += coef

        for (event, vehicle), terms in sorted(cargo_terms.items()):
            if not terms:
                continue
            row_terms = dict(terms)
            row_terms[self.tau[event]] = row_terms.get(self.tau[event], 0.0) - 1.0
            rows.append(self.model.add_constraint(f"layer_time__{event}__{vehicle}", row_terms, Relation.LE, 0.0,
                                                  tag='time'))
        if t_cargo is not None and self.tau:
            rows.append(self.model.add_constraint('cargo_time_budget', {tau: 1.0 for tau in self.tau.values()},
                                                  Relation.LE, float(t_cargo), tag='time'))
        if t_crew is not None:
            for vehicle, terms in sorted(crew_terms.items()):
                if terms:
                    rows.append(self.model.add_constraint(f"crew_time__{vehicle}", dict(terms), Relation.LE,
                                                          float(t_crew), tag='time'))
        if self.time_fixed:
            self.logger.info(f"Fixed {len(self.time_fixed)} vehicle arcs to zero: constant TOF exceeds budget")
        return rows

    def emit_objective(self, launch_costs: Optional[Mapping[Tuple[str, str], float]] = None) -> Dict[int, float]:
        """
        Minimize Σ c⁺·x⁺ over transport and holdover arcs.

        launch_costs maps (origin, destination) to a factor applied to the mass of
        everything sent over matching arcs; arc cost coefficients add to it.
        """
        launch_costs = launch_costs or {}
        mass = self.schema.mass_vector
        terms = defaultdict(float)
        for arc in self.network.transport_arcs:
            factor = launch_costs.get((arc.origin, arc.destination), 0.0)
            plus = self.flow_plus[arc.name]
            for k, name in enumerate(self.schema.names):
                coef = arc.cost_coefficients.get(name, 0.0) + factor * mass[k]
                if coef:
                    terms[plus[k]] += coef
        for hold in self.network.holdover_arcs:
            for name, coef in hold.cost_coefficients.items():
                if coef:
                    terms[self.hold_id(hold, name)] += coef
        self.model.add_objective_terms(terms)
        return dict(terms)

    def build(self, demands: Optional[DemandTable] = None, policies: Sequence = (),
              t_cargo: Optional[float] = None, t_crew: Optional[float] = None,
              launch_costs: Optional[Mapping[Tuple[str, str], float]] = None) -> MilpModel:
        """Run every formulation step and freeze the model."""
        if demands is not None:
            demands.check(self.network)
        self.add_flow_variables()
        self.emit_concurrency(policies)
        self.emit_mass_balance(demands)
        self.emit_transformation()
        self.emit_time_constraints(t_cargo, t_crew)
        self.emit_objective(launch_costs)
        self.model.freeze()
        stats = self.model.statistics()
        self.logger.info(f"Built model '{self.model.name}': {stats['variables']} variables "
                         f"({stats['fixed_variables']} fixed), {stats['constraints']} rows, "
                         f"{stats['sos2_sets']} SOS2 sets")
        return self.model


def build_milp(network: EventNetwork, demands: Optional[DemandTable] = None, policies: Sequence = (),
               t_cargo: Optional[float] = None, t_crew: Optional[float] = None,
               launch_costs: Optional[Mapping[Tuple[str, str], float]] = None,
               name: str = 'event_network') -> Tuple[MilpModel, NetworkMilpBuilder]:
    """Convenience wrapper around NetworkMilpBuilder.build()."""
    builder = NetworkMilpBuilder(network, name)
    model = builder.build(demands, policies, t_cargo, t_crew, launch_costs)
    return model, builder
