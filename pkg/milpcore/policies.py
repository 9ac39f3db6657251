"""
Concurrency policies: capacity and sizing couplings among commodities on one arc.

Each policy is a pluggable class registered in utils.policy_registry and applied
by NetworkMilpBuilder.emit_concurrency().
"""

import logging
from abc import ABC, abstractmethod
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from milpcore.errors import UnknownPolicyTarget
from milpcore.model import Relation


class BaseConcurrencyPolicy(ABC):
    """
    Abstract base class for concurrency policies.

    Subclasses emit rows or bounds through the builder's helpers and report how
    many they added.
    """

    name = 'base'

    def __init__(self):
        self.logger = logging.getLogger(self.__class__.__name__)

    @abstractmethod
    def apply(self, builder) -> int:
        """
        Emit this policy's rows/bounds into builder.model.

        Args:
            builder: NetworkMilpBuilder with flow variables already added

        Returns:
            int: Number of rows and bound fixings emitted
        """

    def get_description(self) -> str:
        return (self.__doc__ or self.name).strip().splitlines()[0]

    def _require(self, builder, *commodities):
        for commodity in commodities:
            if commodity not in builder.schema:
                raise UnknownPolicyTarget(self.name, commodity)


class ZeroFlowPolicy(BaseConcurrencyPolicy):
    """Fix x⁺ and x⁻ to zero for commodities an arc does not admit."""

    name = 'zero_flow'

    def apply(self, builder) -> int:
        count = 0
        names = builder.schema.names
        arcs = [(arc, builder.flow_plus[arc.name], builder.flow_minus[arc.name])
                for arc in builder.network.transport_arcs]
        arcs += [(hold, builder.hold_plus[hold.name], builder.hold_minus[hold.name])
                 for hold in builder.network.holdover_arcs]
        for arc, plus, minus in arcs:
            if arc.allowed_commodities is None:
                continue
            for k, commodity in enumerate(names):
                if commodity not in arc.allowed_commodities:
                    builder.fix_zero(plus[k])
                    builder.fix_zero(minus[k])
                    count += 2
        return count


class FuelCapacityPolicy(BaseConcurrencyPolicy):
    """Propellant carried by a fixed-size vehicle: fuel - C·vehicle ≤ 0 on its arcs."""

    name = 'fuel_capacity'

    def __init__(self, capacities: Optional[Mapping[str, Mapping[str, float]]] = None,
                 riders: Optional[Mapping[str, Iterable[str]]] = None):
        """
        Args:
            capacities: vehicle -> {fuel commodity: capacity in kg}
            riders: vehicle -> host vehicles whose arcs it travels on as a passenger
                (the LM on CSM arcs); its rows are added on those arcs as well
        """
        super().__init__()
        self.capacities = {vehicle: dict(fuels) for vehicle, fuels in (capacities or {}).items()}
        self.riders = {vehicle: frozenset(hosts) for vehicle, hosts in (riders or {}).items()}

    def _carriers(self, arc) -> List[str]:
        carriers = [arc.vehicle] if arc.vehicle in self.capacities else []
        carriers += sorted(vehicle for vehicle, hosts in self.riders.items()
                           if arc.vehicle in hosts and vehicle in self.capacities and arc.allows(vehicle))
        return carriers

    def apply(self, builder) -> int:
        for vehicle, fuels in self.capacities.items():
            self._require(builder, vehicle, *fuels)
        count = 0
        for arc in builder.network.transport_arcs:
            for carrier in self._carriers(arc):
                fuels = self.capacities[carrier]
                carrier_id = builder.flow_id(arc, carrier)
                for fuel, capacity in sorted(fuels.items()):
                    if not arc.allows(fuel):
                        continue
                    suffix = '' if carrier == arc.vehicle else f"__{carrier}"
                    if len(fuels) > 1:
                        suffix += f"__{fuel}"
                    builder.model.add_constraint(f"capacity__{arc.name}{suffix}",
                                                 [(builder.flow_id(arc, fuel), 1.0),
                                                  (carrier_id, -float(capacity))],
                                                 Relation.LE, 0.0, tag='capacity')
                    count += 1
        return count


class UpperStageSizingPolicy(BaseConcurrencyPolicy):
    """Upper stage sized by its propellant: ε̂·fuel - structure ≤ 0 on arcs that burn it."""

    name = 'upper_stage_sizing'

    def __init__(self, eps_hat: float = 0.0, fuel: str = 'fUS', structure: str = 'strUS'):
        super().__init__()
        self.eps_hat = float(eps_hat)
        self.fuel = fuel
        self.structure = structure

    def apply(self, builder) -> int:
        self._require(builder, self.fuel, self.structure)
        count = 0
        for arc in builder.network.transport_arcs:
            if self.fuel not in arc.propellants():
                continue
            builder.model.add_constraint(f"us_sizing__{arc.name}",
                                         [(builder.flow_id(arc, self.fuel), self.eps_hat),
                                          (builder.flow_id(arc, self.structure), -1.0)],
                                         Relation.LE, 0.0, tag='sizing')
            count += 1
        return count


class DroptankSizingPolicy(BaseConcurrencyPolicy):
    """
    Droptank structure covers fuel beyond the crew vehicles' own tanks:
    ε̂·Σ fuel - structure - Σ ε̂·capacity·vehicle ≤ 0 on every arc and holdover.
    """

    name = 'droptank_sizing'

    def __init__(self, eps_hat: float = 0.0, structure: str = 'strDtank',
                 fuel_vehicles: Optional[Mapping[str, Tuple[str, float]]] = None):
        """
        Args:
            eps_hat: ε/(1-ε) of the droptank structure
            structure: Droptank structure commodity
            fuel_vehicles: fuel -> (vehicle whose tank holds it, tank capacity in kg)
        """
        super().__init__()
        self.eps_hat = float(eps_hat)
        self.structure = structure
        self.fuel_vehicles: Dict[str, Tuple[str, float]] = dict(fuel_vehicles or {})

    def _terms(self, allows, flow_id):
        terms = []
        for fuel, (vehicle, capacity) in sorted(self.fuel_vehicles.items()):
            if allows(fuel):
                terms.append((flow_id(fuel), self.eps_hat))
            if allows(vehicle):
                terms.append((flow_id(vehicle), -self.eps_hat * float(capacity)))
        if not any(coef > 0 for _, coef in terms):
            return None
        if allows(self.structure):
            terms.append((flow_id(self.structure), -1.0))
        return terms

    def apply(self, builder) -> int:
        targets = [self.structure]
        for fuel, (vehicle, _) in self.fuel_vehicles.items():
            targets += [fuel, vehicle]
        self._require(builder, *targets)
        count = 0
        for arc in builder.network.transport_arcs:
            terms = self._terms(arc.allows, lambda c, arc=arc: builder.flow_id(arc, c))
            if terms:
                builder.model.add_constraint(f"droptank__{arc.name}", terms, Relation.LE, 0.0, tag='sizing')
                count += 1
        for hold in builder.network.holdover_arcs:
            terms = self._terms(hold.allows, lambda c, hold=hold: builder.hold_id(hold, c))
            if terms:
                builder.model.add_constraint(f"droptank__hold__{hold.name}", terms, Relation.LE, 0.0, tag='sizing')
                count += 1
        return count
