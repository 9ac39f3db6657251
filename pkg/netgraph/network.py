"""
Event-driven expansion of a static network.

The static network is copied once per event layer. Transport arcs live inside a
layer and are bound to exactly one vehicle unit (or to none for exogenous
launches); holdover arcs carry inventory at a node from layer e to layer e+1.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Set, Tuple

import networkx as nx

from netgraph.errors import (
    CyclicLayer,
    DuplicateArc,
    UnknownCommodity,
    UnknownNode,
    UnknownVehicle,
    VehicleNotAllowedInLayer,
)
from netgraph.schema import CommoditySchema
from trajmodels.errors import BadBreakpoints
from trajmodels.surrogates import BaseSurrogate, PwlModel, validate_breakpoints

logger = logging.getLogger(__name__)


class LayerTag(str, Enum):
    CARGO_FORWARD = 'cargo_forward'
    CARGO_RETURN = 'cargo_return'
    CREW_FORWARD = 'crew_forward'
    CREW_RETURN = 'crew_return'

    @property
    def is_cargo(self) -> bool:
        return self in (LayerTag.CARGO_FORWARD, LayerTag.CARGO_RETURN)

    @property
    def is_crew(self) -> bool:
        return not self.is_cargo

    @classmethod
    def cargo(cls) -> FrozenSet['LayerTag']:
        return frozenset({cls.CARGO_FORWARD, cls.CARGO_RETURN})

    @classmethod
    def crew(cls) -> FrozenSet['LayerTag']:
        return frozenset({cls.CREW_FORWARD, cls.CREW_RETURN})


class TransportKey(NamedTuple):
    origin: str
    destination: str
    vehicle: Optional[str]
    event: int


class HoldoverKey(NamedTuple):
    node: str
    event: int


@dataclass(frozen=True)
class Node:
    id: str


@dataclass(frozen=True)
class Burn:
    """
    One propulsive stage of an arc.

    The surrogate acts on the total mass still carried; after the burn the
    jettisoned commodities stop counting towards later stages.
    """

    propellant: str
    surrogate: BaseSurrogate
    jettison: Tuple[str, ...] = ()


@dataclass(frozen=True)
class TofCurve:
    """Arc TOF in days sampled at initial-mass breakpoints in kg."""

    breakpoints_kg: Tuple[float, ...]
    tof_days: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, 'breakpoints_kg', validate_breakpoints(self.breakpoints_kg))
        object.__setattr__(self, 'tof_days', tuple(float(v) for v in self.tof_days))
        if len(self.tof_days) != len(self.breakpoints_kg):
            raise BadBreakpoints("tof_days must have one value per breakpoint")

    @classmethod
    def from_surrogate(cls, surrogate: PwlModel) -> Optional['TofCurve']:
        if surrogate.tof_days is None:
            return None
        return cls(surrogate.breakpoints_kg, surrogate.tof_days)

    def to_dict(self) -> Dict[str, list]:
        return {'breakpoints_kg': list(self.breakpoints_kg), 'tof_days': list(self.tof_days)}

    @classmethod
    def from_dict(cls, data: Mapping[str, Sequence[float]]) -> 'TofCurve':
        return cls(tuple(data['breakpoints_kg']), tuple(data['tof_days']))


@dataclass(frozen=True)
class ArcSpec:
    """A transport arc before it is placed in an event layer."""

    origin: str
    destination: str
    vehicle: Optional[str]
    burns: Tuple[Burn, ...] = ()
    allowed_commodities: Optional[FrozenSet[str]] = None
    cost_coefficients: Mapping[str, float] = field(default_factory=dict)
    pwl_tof: Optional[TofCurve] = None

    def at(self, event: int) -> 'TransportArc':
        return TransportArc(self.origin, self.destination, self.vehicle, event, tuple(self.burns),
                            None if self.allowed_commodities is None else frozenset(self.allowed_commodities),
                            dict(self.cost_coefficients), self.pwl_tof)


@dataclass(frozen=True)
class TransportArc:
    origin: str
    destination: str
    vehicle: Optional[str]
    event: int
    burns: Tuple[Burn, ...] = ()
    allowed_commodities: Optional[FrozenSet[str]] = None
    cost_coefficients: Mapping[str, float] = field(default_factory=dict)
    pwl_tof: Optional[TofCurve] = None

    @property
    def key(self) -> TransportKey:
        return TransportKey(self.origin, self.destination, self.vehicle, self.event)

    @property
    def name(self) -> str:
        return f"{self.origin}__{self.destination}__{self.vehicle or 'none'}__{self.event}"

    @property
    def is_launch(self) -> bool:
        return self.vehicle is None

    @property
    def is_pwl(self) -> bool:
        return any(not burn.surrogate.is_affine for burn in self.burns)

    def allows(self, commodity: str) -> bool:
        return self.allowed_commodities is None or commodity in self.allowed_commodities

    def propellants(self) -> List[str]:
        return [burn.propellant for burn in self.burns]

    def time_pwl(self) -> Optional[TofCurve]:
        """TOF curve for arcs whose arc length is piecewise linear in y⁺."""
        if self.pwl_tof is not None:
            return self.pwl_tof
        for burn in self.burns:
            if isinstance(burn.surrogate, PwlModel):
                curve = TofCurve.from_surrogate(burn.surrogate)
                if curve is not None:
                    return curve
        return None

    def time_coefficients(self) -> Optional[Tuple[float, float]]:
        """
        Affine arc length (¹q per kg of y⁺, ⁰q per vehicle unit) summed over stages.

        Returns None when some stage has no affine TOF model.
        """
        q1 = q0 = 0.0
        for burn in self.burns:
            coefficients = burn.surrogate.time_coefficients()
            if coefficients is None:
                return None
            q1 += coefficients[0]
            q0 += coefficients[1]
        return q1, q0


@dataclass(frozen=True)
class HoldoverArc:
    node: str
    from_event: int
    allowed_commodities: Optional[FrozenSet[str]] = None
    cost_coefficients: Mapping[str, float] = field(default_factory=dict)

    @property
    def to_event(self) -> int:
        return self.from_event + 1

    @property
    def key(self) -> HoldoverKey:
        return HoldoverKey(self.node, self.from_event)

    @property
    def name(self) -> str:
        return f"{self.node}__{self.from_event}"

    def allows(self, commodity: str) -> bool:
        return self.allowed_commodities is None or commodity in self.allowed_commodities


@dataclass(frozen=True)
class LayerSpec:
    tag: LayerTag
    arcs: Tuple[ArcSpec, ...] = ()


@dataclass(frozen=True)
class EventLayer:
    index: int
    tag: LayerTag
    active_arcs: Tuple[TransportKey, ...] = ()


class DemandTable:
    """
    Per (node, event) commodity demand vector; supply positive, demand negative.

    Values may be +inf for unlimited supply.
    """

    def __init__(self, nodes: Optional[Iterable[str]] = None, schema: Optional[CommoditySchema] = None):
        self._nodes = None if nodes is None else frozenset(nodes)
        self._schema = schema
        self._entries: Dict[Tuple[str, int], Dict[str, float]] = defaultdict(dict)

    def set(self, node: str, event: int, commodity: str, value: float):
        if self._nodes is not None and node not in self._nodes:
            raise UnknownNode(node, ' in demand table')
        if self._schema is not None and commodity not in self._schema:
            raise UnknownCommodity(commodity, ' in demand table')
        self._entries[(node, int(event))][commodity] = float(value)

    def add(self, node: str, event: int, commodity: str, value: float):
        current = self.value(node, event, commodity)
        self.set(node, event, commodity, current + value)

    def value(self, node: str, event: int, commodity: str) -> float:
        return self._entries.get((node, event), {}).get(commodity, 0.0)

    def get(self, node: str, event: int) -> Dict[str, float]:
        return dict(self._entries.get((node, event), {}))

    def items(self):
        return ((key, dict(values)) for key, values in sorted(self._entries.items()))

    def supplied(self, node: str, event: int) -> Set[str]:
        return {c for c, v in self._entries.get((node, event), {}).items() if v > 0}

    def check(self, network: 'EventNetwork'):
        """Raise if an entry refers to a node, event or commodity the network lacks."""
        for (node, event), values in self._entries.items():
            if node not in network.node_set:
                raise UnknownNode(node, ' in demand table')
            if not 1 <= event <= len(network.layers):
                raise ValueError(f"Demand table refers to event {event} outside 1..{len(network.layers)}")
            for commodity in values:
                network.schema.index(commodity)

    def __len__(self):
        return len(self._entries)


class EventNetwork:
    """Immutable event-expanded multigraph."""

    def __init__(self, nodes: Sequence[str], schema: CommoditySchema, layers: Sequence[EventLayer],
                 transport_arcs: Sequence[TransportArc], holdover_arcs: Sequence[HoldoverArc]):
        self.nodes: Tuple[str, ...] = tuple(nodes)
        self.node_set = frozenset(self.nodes)
        self.schema = schema
        self.layers: Tuple[EventLayer, ...] = tuple(layers)
        self.transport_arcs: Tuple[TransportArc, ...] = tuple(transport_arcs)
        self.holdover_arcs: Tuple[HoldoverArc, ...] = tuple(holdover_arcs)

        self._outgoing = defaultdict(list)
        self._incoming = defaultdict(list)
        self._by_layer = defaultdict(list)
        for arc in self.transport_arcs:
            self._outgoing[(arc.origin, arc.event)].append(arc)
            self._incoming[(arc.destination, arc.event)].append(arc)
            self._by_layer[arc.event].append(arc)
        self._holdovers = {arc.key: arc for arc in self.holdover_arcs}

    def __repr__(self):
        return (f"EventNetwork(nodes={len(self.nodes)}, layers={len(self.layers)}, "
                f"transport_arcs={len(self.transport_arcs)}, holdover_arcs={len(self.holdover_arcs)})")

    @property
    def node_instance_count(self) -> int:
        return len(self.nodes) * len(self.layers)

    def layer(self, event: int) -> EventLayer:
        return self.layers[event - 1]

    def arcs_in_layer(self, event: int) -> List[TransportArc]:
        return list(self._by_layer.get(event, []))

    def outgoing(self, node: str, event: int) -> List[TransportArc]:
        return list(self._outgoing.get((node, event), []))

    def incoming(self, node: str, event: int) -> List[TransportArc]:
        return list(self._incoming.get((node, event), []))

    def holdover(self, node: str, from_event: int) -> Optional[HoldoverArc]:
        return self._holdovers.get(HoldoverKey(node, from_event))

    def find_arcs(self, origin: str, destination: str, event: int) -> List[TransportArc]:
        return [arc for arc in self._outgoing.get((origin, event), []) if arc.destination == destination]

    def layer_graph(self, event: int) -> nx.MultiDiGraph:
        graph = nx.MultiDiGraph()
        for arc in self._by_layer.get(event, []):
            graph.add_edge(arc.origin, arc.destination, key=arc.vehicle)
        return graph

    def topological_order(self, event: int) -> List[str]:
        return list(nx.topological_sort(self.layer_graph(event)))

    def cargo_events(self) -> List[int]:
        return [layer.index for layer in self.layers if layer.tag.is_cargo]

    def crew_events(self) -> List[int]:
        return [layer.index for layer in self.layers if layer.tag.is_crew]


def _check_arc(arc: ArcSpec, node_set, schema: CommoditySchema, event: int):
    context = f" on arc {arc.origin}->{arc.destination} in layer {event}"
    for node in (arc.origin, arc.destination):
        if node not in node_set:
            raise UnknownNode(node, context)
    if arc.vehicle is not None and (arc.vehicle not in schema or not schema.is_discrete(arc.vehicle)):
        raise UnknownVehicle(arc.vehicle, context)
    names = set(arc.allowed_commodities or ()) | set(arc.cost_coefficients)
    for burn in arc.burns:
        names.add(burn.propellant)
        names.update(burn.jettison)
    for name in names:
        if name not in schema:
            raise UnknownCommodity(name, context)


def _check_acyclic(event: int, arcs: Iterable[ArcSpec]):
    graph = nx.DiGraph()
    for arc in arcs:
        graph.add_edge(arc.origin, arc.destination)
    if not nx.is_directed_acyclic_graph(graph):
        raise CyclicLayer(event, nx.find_cycle(graph))


def build_event_network(static_nodes: Sequence[str], layer_specs: Sequence[LayerSpec], schema: CommoditySchema,
                        holdover_allowed: Optional[Mapping[Tuple[str, int], Iterable[str]]] = None,
                        holdover_costs: Optional[Mapping[Tuple[str, int], Mapping[str, float]]] = None) -> EventNetwork:
    """
    Duplicate the static network once per layer spec and connect the copies.

    Args:
        static_nodes: Node ids of the static network
        layer_specs: One spec per event layer, in event order
        schema: Commodity schema shared by every arc
        holdover_allowed: Optional allow-list per (node, from_event); missing keys allow everything
        holdover_costs: Optional per-commodity holdover costs

    Returns:
        EventNetwork: The expanded network

    Raises:
        CyclicLayer, UnknownNode, UnknownVehicle, UnknownCommodity
    """
    if not layer_specs:
        raise ValueError("At least one event layer is required")
    nodes = list(static_nodes)
    if len(set(nodes)) != len(nodes):
        raise ValueError("Static node ids must be unique")
    node_set = frozenset(nodes)
    holdover_allowed = holdover_allowed or {}
    holdover_costs = holdover_costs or {}

    layers, arcs = [], []
    for event, spec in enumerate(layer_specs, start=1):
        for arc in spec.arcs:
            _check_arc(arc, node_set, schema, event)
        _check_acyclic(event, spec.arcs)
        placed = [arc.at(event) for arc in spec.arcs]
        arcs.extend(placed)
        layers.append(EventLayer(event, LayerTag(spec.tag), tuple(arc.key for arc in placed)))

    holdovers = []
    for event in range(1, len(layer_specs)):
        for node in nodes:
            allowed = holdover_allowed.get((node, event))
            if allowed is not None:
                allowed = frozenset(allowed)
                for name in allowed:
                    if name not in schema:
                        raise UnknownCommodity(name, f" in holdover {node}/{event}")
            holdovers.append(HoldoverArc(node, event, allowed, dict(holdover_costs.get((node, event), {}))))

    network = EventNetwork(nodes, schema, layers, arcs, holdovers)
    logger.info(f"Built {network}")
    return network


def with_holdover_allowed(network: EventNetwork, allowed: Mapping[Tuple[str, int], Iterable[str]]) -> EventNetwork:
    """Return a copy of the network with replaced holdover allow-lists."""
    holdovers = [replace(arc, allowed_commodities=frozenset(allowed[arc.key]) if arc.key in allowed
                         else arc.allowed_commodities) for arc in network.holdover_arcs]
    return EventNetwork(network.nodes, network.schema, network.layers, network.transport_arcs, holdovers)


@dataclass
class MultigraphReport:
    duplicates: List[TransportKey] = field(default_factory=list)
    inadmissible: List[Tuple[str, int, str]] = field(default_factory=list)

    @property
    def issues(self) -> List[str]:
        messages = [str(DuplicateArc(key)) for key in self.duplicates]
        messages += [str(VehicleNotAllowedInLayer(*item)) for item in self.inadmissible]
        return messages

    @property
    def is_clean(self) -> bool:
        return not self.duplicates and not self.inadmissible


def validate_multigraph(network: EventNetwork,
                        admissibility: Optional[Mapping[str, Iterable[LayerTag]]] = None,
                        strict: bool = True) -> MultigraphReport:
    """
    Check the multigraph structure of a built network.

    Args:
        network: Network to check
        admissibility: Optional map vehicle -> layer tags it may appear in. Both the arc
            vehicle and any discrete allowed commodity are checked.
        strict: Raise on the first problem instead of only reporting it

    Returns:
        MultigraphReport: Empty when the network is well formed
    """
    report = MultigraphReport()
    seen = set()
    for arc in network.transport_arcs:
        if arc.key in seen:
            if strict:
                raise DuplicateArc(arc.key)
            report.duplicates.append(arc.key)
        seen.add(arc.key)

    if admissibility:
        allowed_tags = {vehicle: frozenset(LayerTag(t) for t in tags) for vehicle, tags in admissibility.items()}
        for arc in network.transport_arcs:
            tag = network.layer(arc.event).tag
            vehicles = {arc.vehicle} if arc.vehicle else set()
            vehicles |= {c for c in (arc.allowed_commodities or ()) if c in allowed_tags}
            for vehicle in sorted(vehicles):
                if vehicle in allowed_tags and tag not in allowed_tags[vehicle]:
                    if strict:
                        raise VehicleNotAllowedInLayer(vehicle, arc.event, tag.value)
                    report.inadmissible.append((vehicle, arc.event, tag.value))

    if report.is_clean:
        logger.debug("Multigraph validation passed")
    else:
        logger.warning(f"Multigraph validation found {len(report.issues)} issues")
    return report


def reachable_commodities(static_nodes: Sequence[str], layer_specs: Sequence[LayerSpec],
                          supplies: Callable[[str, int], Iterable[str]]) -> Dict[Tuple[str, int], FrozenSet[str]]:
    """
    Forward-propagate which commodities can be present at each node during each layer.

    An arc moves whatever is present at its origin and allowed on it, provided its
    vehicle is present. Everything reachable is assumed to be held over.

    Args:
        static_nodes: Node ids
        layer_specs: Layer specs in event order
        supplies: Callable (node, event) -> commodities with positive supply there

    Returns:
        Dict[(node, event), frozenset]: Commodities possibly present at the end of each layer
    """
    present = {node: set() for node in static_nodes}
    reachable = {}
    for event, spec in enumerate(layer_specs, start=1):
        for node in static_nodes:
            present[node] |= set(supplies(node, event))
        graph = nx.DiGraph()
        by_origin = defaultdict(list)
        for arc in spec.arcs:
            graph.add_edge(arc.origin, arc.destination)
            by_origin[arc.origin].append(arc)
        for node in nx.topological_sort(graph):
            for arc in by_origin[node]:
                if arc.vehicle is not None and arc.vehicle not in present[node]:
                    continue
                moved = present[node] if arc.allowed_commodities is None else present[node] & arc.allowed_commodities
                present[arc.destination] |= moved
        for node in static_nodes:
            reachable[(node, event)] = frozenset(present[node])
    return reachable
