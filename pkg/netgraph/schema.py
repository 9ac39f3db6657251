"""
Commodity schema: the ordered k-commodity bundle flowing on every arc.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np

from netgraph.errors import InvalidSchema, UnknownCommodity


class CommodityKind(str, Enum):
    BINARY = 'binary'
    INTEGER = 'integer'
    CONTINUOUS = 'continuous'

    @property
    def is_discrete(self) -> bool:
        return self is not CommodityKind.CONTINUOUS


@dataclass(frozen=True)
class Commodity:
    """One entry of the schema; unit_mass is the diagonal of the mass matrix M (kg per unit)."""

    name: str
    kind: CommodityKind
    unit_mass: float = 1.0


class CommoditySchema:
    """
    Ordered, immutable list of commodities.

    Indices are stable after construction. Continuous commodities are mass
    denominated (unit mass 1 kg); vehicles carry their dry mass as unit mass.
    """

    def __init__(self, entries: Iterable[Union[Commodity, Tuple[str, str, float], Tuple[str, str]]]):
        commodities = []
        for entry in entries:
            if not isinstance(entry, Commodity):
                name, kind, *rest = entry
                entry = Commodity(name, CommodityKind(kind), float(rest[0]) if rest else 1.0)
            commodities.append(entry)

        index = {}
        for position, commodity in enumerate(commodities):
            if commodity.name in index:
                raise InvalidSchema(f"Duplicate commodity name '{commodity.name}'")
            if commodity.unit_mass <= 0:
                raise InvalidSchema(f"Commodity '{commodity.name}' needs a positive unit mass")
            if commodity.kind is CommodityKind.CONTINUOUS and commodity.unit_mass != 1.0:
                raise InvalidSchema(f"Continuous commodity '{commodity.name}' must have unit mass 1")
            index[commodity.name] = position

        self._entries: Tuple[Commodity, ...] = tuple(commodities)
        self._index: Dict[str, int] = index
        self._mass = np.array([c.unit_mass for c in commodities], dtype=float)
        self._mass.setflags(write=False)

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def __contains__(self, name):
        return name in self._index

    def __eq__(self, other):
        return isinstance(other, CommoditySchema) and self._entries == other._entries

    def __hash__(self):
        return hash(self._entries)

    def __repr__(self):
        return f"CommoditySchema({', '.join(self.names)})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownCommodity(name) from None

    def indices(self, names: Iterable[str]) -> List[int]:
        return [self.index(name) for name in names]

    def entry(self, name: str) -> Commodity:
        return self._entries[self.index(name)]

    @property
    def names(self) -> List[str]:
        return [c.name for c in self._entries]

    @property
    def mass_vector(self) -> np.ndarray:
        """Read-only diagonal of M."""
        return self._mass

    def unit_mass(self, name: str) -> float:
        return self._entries[self.index(name)].unit_mass

    def is_discrete(self, name: str) -> bool:
        return self.entry(name).kind.is_discrete

    def discrete_names(self) -> List[str]:
        return [c.name for c in self._entries if c.kind.is_discrete]

    def continuous_names(self) -> List[str]:
        return [c.name for c in self._entries if not c.kind.is_discrete]

    def mask(self, names: Iterable[str]) -> np.ndarray:
        """Boolean mask over schema indices."""
        mask = np.zeros(len(self), dtype=bool)
        mask[self.indices(names)] = True
        return mask

    def to_dict(self) -> List[Dict]:
        return [{'name': c.name, 'kind': c.kind.value, 'unit_mass': c.unit_mass} for c in self._entries]

    @classmethod
    def from_dict(cls, data: Sequence[Dict]) -> 'CommoditySchema':
        return cls(Commodity(item['name'], CommodityKind(item['kind']), float(item.get('unit_mass', 1.0)))
                   for item in data)
