"""
Cislunar refuelling campaign: network, demands, policies and the MILP.

Layers 1..4R are R repetitions of the cargo pattern
    F1 launch and Earth departure, F2 way station to LLO,
    R1 LLO to way station, R2 way station to the Earth parking orbit;
layers 4R+1..4R+2M are one forward and one return layer per crew mission.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import config
from cislunar.campaign_config import CampaignConfig
from cislunar.errors import ConfigError
from milpcore import MilpModel, NetworkMilpBuilder
from netgraph import (
    ArcSpec,
    Burn,
    Commodity,
    CommodityKind,
    CommoditySchema,
    DemandTable,
    EventNetwork,
    LayerSpec,
    LayerTag,
    build_event_network,
    reachable_commodities,
    validate_multigraph,
)
from trajmodels import TrajectoryRegistry, load_fit_tables
from utils.policy_registry import get_policy

logger = logging.getLogger(__name__)

ES, LEO, GTO, TLI, EML1, EML2, LLO = 'ES', 'LEO', 'GTO', 'TLI', 'EML1', 'EML2', 'LLO'
NODES = [ES, LEO, GTO, TLI, EML1, EML2, LLO]
WAY_STATIONS = [EML1, EML2]

CREW_VEHICLES = ['CSM', 'LM']
CREW_COMMODITIES = ['strUS', 'fUS', 'CSM', 'fCSM', 'LM', 'fLM']
CARGO_PAYLOADS = ['fLM', 'fCSM', 'strDtank']
TUG_FUELS = ['fHIGH', 'fLOW']
CONTINUOUS = ['strUS', 'fUS', 'fCSM', 'fLM', 'strDtank', 'fHIGH', 'fLOW']

# Crew route legs: (origin, destination, [(stage, crew arc label, jettison), ...])
CREW_FORWARD_LEGS = [
    (LEO, TLI, [('US', 'LEO to TLI', ())]),
    (TLI, LLO, [('CSM', 'TLI to LLO', ())]),
    (LEO, EML1, [('US', 'LEO to TL1I', ('strUS', 'fUS')), ('CSM', 'TL1I to L1', ())]),
    (EML1, LLO, [('CSM', 'L1 to LLO', ())]),
    (LEO, EML2, [('US', 'LEO to TL2I', ('strUS', 'fUS')), ('CSM', 'TL2I to L2', ())]),
    (EML2, LLO, [('CSM', 'L2 to LLO', ())]),
]
CREW_RETURN_LEGS = [
    (LLO, ES, [('CSM', 'LLO to ES', ())]),
    (LLO, EML1, [('CSM', 'LLO to L1', ())]),
    (EML1, ES, [('CSM', 'L1 to ES', ())]),
    (LLO, EML2, [('CSM', 'LLO to L2', ())]),
    (EML2, ES, [('CSM', 'L2 to ES', ())]),
]

CARGO_PATTERN = [LayerTag.CARGO_FORWARD, LayerTag.CARGO_FORWARD, LayerTag.CARGO_RETURN, LayerTag.CARGO_RETURN]


def build_schema(registry: TrajectoryRegistry) -> CommoditySchema:
    """The case-study commodities: crew stack, propellants, droptanks and one binary per tug unit."""
    crew = registry.crew_vehicles
    entries = [
        Commodity('strUS', CommodityKind.CONTINUOUS),
        Commodity('fUS', CommodityKind.CONTINUOUS),
        Commodity('CSM', CommodityKind.BINARY, crew['CSM'].dry_mass_kg),
        Commodity('fCSM', CommodityKind.CONTINUOUS),
        Commodity('LM', CommodityKind.BINARY, crew['LM'].dry_mass_kg),
        Commodity('fLM', CommodityKind.CONTINUOUS),
        Commodity('strDtank', CommodityKind.CONTINUOUS),
        Commodity('fHIGH', CommodityKind.CONTINUOUS),
        Commodity('fLOW', CommodityKind.CONTINUOUS),
    ]
    entries += [Commodity(unit, CommodityKind.BINARY, registry.unit_spec(unit).dry_mass_kg)
                for unit in registry.unit_names()]
    return CommoditySchema(entries)


@dataclass
class CampaignInstance:
    """Everything built for one campaign configuration."""

    config: CampaignConfig
    registry: TrajectoryRegistry
    schema: CommoditySchema
    network: EventNetwork
    demands: DemandTable
    policies: list
    builder: NetworkMilpBuilder
    tugs: List[str]

    @property
    def model(self) -> MilpModel:
        return self.builder.model

    @property
    def crew_forward_events(self) -> List[int]:
        return [layer.index for layer in self.network.layers if layer.tag is LayerTag.CREW_FORWARD]

    @property
    def crew_return_events(self) -> List[int]:
        return [layer.index for layer in self.network.layers if layer.tag is LayerTag.CREW_RETURN]


class CampaignBuilder:
    """
    Assembles the layer specs, demands, holdover allow-lists and policies of a campaign.
    """

    def __init__(self, campaign: CampaignConfig, registry: TrajectoryRegistry):
        self.campaign = campaign
        self.registry = registry
        self.logger = logging.getLogger(self.__class__.__name__)
        self.tugs = self._enabled_tugs()
        self.schema = build_schema(registry)

    def _enabled_tugs(self) -> List[str]:
        fleet = self.registry.unit_names()
        if self.campaign.enabled_tugs is None:
            return fleet
        unknown = [unit for unit in self.campaign.enabled_tugs if unit not in fleet]
        if unknown:
            raise ConfigError(f"Unknown tug units in enabled_tugs: {unknown}")
        return [unit for unit in fleet if unit in set(self.campaign.enabled_tugs)]

    # Arcs

    def _tug_arc(self, unit: str, origin: str, destination: str, payload: bool = True) -> ArcSpec:
        spec = self.registry.unit_spec(unit)
        fuel = spec.fuel_commodity
        allowed = {unit, fuel} | (set(CARGO_PAYLOADS) if payload else set())
        burn = Burn(fuel, self.registry.tug_model(unit, origin, destination))
        return ArcSpec(origin, destination, unit, (burn,), frozenset(allowed))

    def _launch_arc(self, destination: str, allowed: Iterable[str]) -> ArcSpec:
        return ArcSpec(ES, destination, None, (), frozenset(allowed))

    def _crew_arc(self, origin: str, destination: str, stages, allowed: Iterable[str]) -> ArcSpec:
        burns = []
        for stage, label, jettison in stages:
            crew_arc = self.registry.crew_arc(label)
            fuel = self.registry.crew_vehicles[stage].fuel_commodity
            burns.append(Burn(fuel, crew_arc.model, tuple(jettison)))
        return ArcSpec(origin, destination, 'CSM', tuple(burns), frozenset(allowed))

    def _cargo_layers(self) -> List[LayerSpec]:
        cp = [unit for unit in self.tugs if self.registry.unit_spec(unit).propulsion == 'CP']
        sep = [unit for unit in self.tugs if self.registry.unit_spec(unit).propulsion == 'SEP']
        launch_allowed = set(self.tugs) | set(TUG_FUELS) | set(CARGO_PAYLOADS)

        f1 = [self._launch_arc(LEO, launch_allowed), self._launch_arc(GTO, launch_allowed)]
        f1 += [self._tug_arc(unit, LEO, station) for unit in cp for station in WAY_STATIONS]
        f1 += [self._tug_arc(unit, GTO, station) for unit in sep for station in WAY_STATIONS]
        f2 = [self._tug_arc(unit, station, LLO) for unit in self.tugs for station in WAY_STATIONS]
        r1 = [self._tug_arc(unit, LLO, station) for unit in self.tugs for station in WAY_STATIONS]
        r2 = [self._tug_arc(unit, station, LEO, payload=False) for unit in cp for station in WAY_STATIONS]
        r2 += [self._tug_arc(unit, station, GTO, payload=False) for unit in sep for station in WAY_STATIONS]

        pattern = [f1, f2, r1, r2]
        layers = []
        for _ in range(self.campaign.tug_reuse_limit):
            layers += [LayerSpec(tag, tuple(arcs)) for tag, arcs in zip(CARGO_PATTERN, pattern)]
        return layers

    def _crew_layers(self) -> List[LayerSpec]:
        launch = self._launch_arc(LEO, CREW_COMMODITIES)
        forward = [launch]
        for origin, destination, stages in CREW_FORWARD_LEGS:
            allowed = set(CREW_COMMODITIES) if origin == LEO else {'CSM', 'LM', 'fCSM', 'fLM'}
            forward.append(self._crew_arc(origin, destination, stages, allowed))
        back = [self._crew_arc(origin, destination, stages, {'CSM', 'fCSM'})
                for origin, destination, stages in CREW_RETURN_LEGS]
        layers = []
        for _ in range(self.campaign.missions):
            layers.append(LayerSpec(LayerTag.CREW_FORWARD, tuple(forward)))
            layers.append(LayerSpec(LayerTag.CREW_RETURN, tuple(back)))
        return layers

    def layer_specs(self) -> List[LayerSpec]:
        return self._cargo_layers() + self._crew_layers()

    # Demands

    def demands(self, layer_specs: List[LayerSpec]) -> DemandTable:
        """
        Supply positive, demand negative. Continuous commodities are unlimited at ES;
        each crew forward layer supplies a fresh CSM and LM at ES and demands the LM
        and its propellant at LLO; each return layer demands the CSM back at ES.
        """
        table = DemandTable(NODES, self.schema)
        for unit in self.tugs:
            table.set(ES, 1, unit, 1.0)
        for event, spec in enumerate(layer_specs, start=1):
            for name in CONTINUOUS:
                table.set(ES, event, name, math.inf)
            if spec.tag is LayerTag.CREW_FORWARD:
                table.set(ES, event, 'CSM', 1.0)
                table.set(ES, event, 'LM', 1.0)
                table.set(LLO, event, 'LM', -1.0)
                if self.campaign.flm_demand_per_mission_kg:
                    table.set(LLO, event, 'fLM', -self.campaign.flm_demand_per_mission_kg)
            elif spec.tag is LayerTag.CREW_RETURN:
                table.set(ES, event, 'CSM', -1.0)
        return table

    def holdover_allowed(self, layer_specs: List[LayerSpec],
                         demands: DemandTable) -> Dict[Tuple[str, int], FrozenSet[str]]:
        """
        Reachable commodities per (node, layer), minus what may not wait there:
        crew items after cargo layers, tugs and tug fuel after crew layers, the
        upper stage everywhere, and crew vehicles at ES.
        """
        reachable = reachable_commodities(NODES, layer_specs, demands.supplied)
        tug_items = set(self.registry.unit_names()) | set(TUG_FUELS)
        allowed = {}
        for event, spec in enumerate(layer_specs[:-1], start=1):
            if spec.tag.is_cargo:
                excluded = {'CSM', 'LM', 'strUS', 'fUS'}
            else:
                excluded = tug_items | {'strUS', 'fUS'}
            for node in NODES:
                names = set(reachable[(node, event)]) - excluded
                if node == ES:
                    names -= set(CREW_VEHICLES)
                allowed[(node, event)] = frozenset(names)
        return allowed

    # Policies

    def policy_arguments(self) -> Dict[str, dict]:
        crew = self.registry.crew_vehicles
        capacities = {}
        for unit in self.tugs:
            spec = self.registry.unit_spec(unit)
            capacities[unit] = {spec.fuel_commodity: spec.propellant_capacity_kg}
        for vehicle in CREW_VEHICLES:
            capacities[vehicle] = {crew[vehicle].fuel_commodity: crew[vehicle].propellant_capacity_kg}
        return {
            'zero_flow': {},
            'fuel_capacity': {'capacities': capacities, 'riders': {'LM': ['CSM']}},
            'upper_stage_sizing': {'eps_hat': crew['US'].eps_hat, 'fuel': crew['US'].fuel_commodity,
                                   'structure': 'strUS'},
            'droptank_sizing': {
                'eps_hat': crew['CSM'].eps_hat,
                'structure': 'strDtank',
                'fuel_vehicles': {
                    crew['LM'].fuel_commodity: ('LM', crew['LM'].propellant_capacity_kg),
                    crew['CSM'].fuel_commodity: ('CSM', crew['CSM'].propellant_capacity_kg),
                },
            },
        }

    def policies(self) -> list:
        arguments = self.policy_arguments()
        policies = []
        for name in self.campaign.policies:
            if name not in arguments:
                raise ConfigError(f"Unknown concurrency policy '{name}'")
            policy = get_policy(name, **arguments[name])
            if policy is None:
                raise ConfigError(f"Concurrency policy '{name}' could not be created")
            policies.append(policy)
        return policies

    def admissibility(self) -> Dict[str, List[LayerTag]]:
        rules = {unit: sorted(LayerTag.cargo()) for unit in self.registry.unit_names()}
        rules.update({vehicle: sorted(LayerTag.crew()) for vehicle in CREW_VEHICLES})
        return rules

    def build(self) -> CampaignInstance:
        specs = self.layer_specs()
        demands = self.demands(specs)
        network = build_event_network(NODES, specs, self.schema, self.holdover_allowed(specs, demands))
        validate_multigraph(network, self.admissibility(), strict=True)

        builder = NetworkMilpBuilder(network, name=self.campaign.name)
        launch_costs = {(ES, destination): factor for destination, factor in config.LaunchCosts.by_destination().items()}
        policies = self.policies()
        builder.build(demands, policies, self.campaign.t_cargo_days, self.campaign.t_crew_days, launch_costs)
        self.logger.info(f"Campaign '{self.campaign.name}': {len(self.tugs)} tugs, {self.campaign.cargo_layers} cargo "
                         f"+ {2 * self.campaign.missions} crew layers, T_cargo={self.campaign.t_cargo_days}, "
                         f"T_crew={self.campaign.t_crew_days}")
        return CampaignInstance(self.campaign, self.registry, self.schema, network, demands, policies, builder,
                                self.tugs)


def load_registry(campaign: CampaignConfig, tables_dir: Optional[str] = None,
                  verify: bool = True) -> TrajectoryRegistry:
    """Fit tables with the campaign's vehicle overrides and gravity applied."""
    return load_fit_tables(tables_dir, verify=verify, overrides=campaign.vehicle_overrides or None,
                           g0=campaign.standard_gravity)


def assemble_campaign(campaign: CampaignConfig, registry: Optional[TrajectoryRegistry] = None) -> CampaignInstance:
    """
    Build network, demands, policies and model of a campaign.

    Args:
        campaign: Campaign configuration
        registry: Loaded fit tables. Loaded from config.TABLES_DIR with the
            campaign's overrides when omitted.

    Returns:
        CampaignInstance: The network and the frozen model with its builder
    """
    registry = registry or load_registry(campaign)
    return CampaignBuilder(campaign, registry).build()


def build_campaign(campaign: CampaignConfig, registry: Optional[TrajectoryRegistry] = None) -> MilpModel:
    """The campaign MILP (see assemble_campaign for the full instance)."""
    return assemble_campaign(campaign, registry).model
