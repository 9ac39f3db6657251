"""
JSON round trip for event networks (used by --dump-network).
"""

import json
import logging
from typing import Any, Dict

from netgraph.network import ArcSpec, Burn, EventNetwork, LayerSpec, LayerTag, TofCurve, build_event_network
from netgraph.schema import CommoditySchema
from trajmodels.surrogates import surrogate_from_dict

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


def _arc_to_dict(arc) -> Dict[str, Any]:
    data = {
        'origin': arc.origin,
        'destination': arc.destination,
        'vehicle': arc.vehicle,
        'burns': [{'propellant': b.propellant, 'surrogate': b.surrogate.to_dict(), 'jettison': list(b.jettison)}
                  for b in arc.burns],
        'allowed_commodities': None if arc.allowed_commodities is None else sorted(arc.allowed_commodities),
        'cost_coefficients': dict(sorted(arc.cost_coefficients.items())),
    }
    if arc.pwl_tof is not None:
        data['pwl_tof'] = arc.pwl_tof.to_dict()
    return data


def _arc_from_dict(data: Dict[str, Any]) -> ArcSpec:
    allowed = data.get('allowed_commodities')
    pwl_tof = data.get('pwl_tof')
    return ArcSpec(
        origin=data['origin'],
        destination=data['destination'],
        vehicle=data.get('vehicle'),
        burns=tuple(Burn(b['propellant'], surrogate_from_dict(b['surrogate']), tuple(b.get('jettison', ())))
                    for b in data.get('burns', [])),
        allowed_commodities=None if allowed is None else frozenset(allowed),
        cost_coefficients=dict(data.get('cost_coefficients', {})),
        pwl_tof=TofCurve.from_dict(pwl_tof) if pwl_tof else None,
    )


def network_to_dict(network: EventNetwork) -> Dict[str, Any]:
    """
    Serialize nodes, schema, layers with their arcs and holdover allow-lists.

    Ordering follows construction order, so the output is deterministic.
    """
    layers = []
    for layer in network.layers:
        layers.append({
            'index': layer.index,
            'tag': layer.tag.value,
            'arcs': [_arc_to_dict(arc) for arc in network.arcs_in_layer(layer.index)],
        })
    holdovers = []
    for arc in network.holdover_arcs:
        if arc.allowed_commodities is None and not arc.cost_coefficients:
            continue
        holdovers.append({
            'node': arc.node,
            'from_event': arc.from_event,
            'allowed_commodities': None if arc.allowed_commodities is None else sorted(arc.allowed_commodities),
            'cost_coefficients': dict(sorted(arc.cost_coefficients.items())),
        })
    return {
        'format_version': FORMAT_VERSION,
        'nodes': list(network.nodes),
        'schema': network.schema.to_dict(),
        'layers': layers,
        'holdovers': holdovers,
    }


def network_from_dict(data: Dict[str, Any]) -> EventNetwork:
    if data.get('format_version', FORMAT_VERSION) != FORMAT_VERSION:
        raise ValueError(f"Unsupported network format version {data.get('format_version')}")
    schema = CommoditySchema.from_dict(data['schema'])
    layer_specs = [LayerSpec(LayerTag(layer['tag']), tuple(_arc_from_dict(arc) for arc in layer['arcs']))
                   for layer in sorted(data['layers'], key=lambda item: item['index'])]
    allowed, costs = {}, {}
    for item in data.get('holdovers', []):
        key = (item['node'], int(item['from_event']))
        if item.get('allowed_commodities') is not None:
            allowed[key] = item['allowed_commodities']
        if item.get('cost_coefficients'):
            costs[key] = item['cost_coefficients']
    return build_event_network(data['nodes'], layer_specs, schema, allowed, costs)


def dump_network(network: EventNetwork, path: str):
    with open(path, 'w', encoding='utf-8') as handle:
        json.dump(network_to_dict(network), handle, indent=2, sort_keys=False)
        handle.write('\n')
    logger.info(f"Network written to {path}")


def load_network(path: str) -> EventNetwork:
    with open(path, 'r', encoding='utf-8') as handle:
        return network_from_dict(json.load(handle))
