"""
Static network, commodity schema and event-driven multigraph expansion.
"""

from netgraph.errors import (
    CyclicLayer,
    DuplicateArc,
    InvalidSchema,
    NetworkError,
    UnknownCommodity,
    UnknownNode,
    UnknownVehicle,
    VehicleNotAllowedInLayer,
)
from netgraph.network import (
    ArcSpec,
    Burn,
    DemandTable,
    EventLayer,
    EventNetwork,
    HoldoverArc,
    HoldoverKey,
    LayerSpec,
    LayerTag,
    MultigraphReport,
    Node,
    TofCurve,
    TransportArc,
    TransportKey,
    build_event_network,
    reachable_commodities,
    validate_multigraph,
    with_holdover_allowed,
)
from netgraph.schema import Commodity, CommodityKind, CommoditySchema
from netgraph.serialization import dump_network, load_network, network_from_dict, network_to_dict
