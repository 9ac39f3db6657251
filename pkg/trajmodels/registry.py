"""
Loader for the versioned fit tables under data/tables.

The registry is immutable after load. Keys follow the table labels: arcs are
named "<from> to <to>" with the halo orbits written L1/L2, vehicle types are
"CP" (or "CP-1".."CP-3") and "SEP type 1".."SEP type 3".
"""

import hashlib
import json
import logging
import os
from dataclasses import dataclass
from types import MappingProxyType
from typing import Any, Dict, List, Mapping, Optional, Tuple

import pandas as pd

import config
from trajmodels.errors import MissingRow, SchemaError
from trajmodels.surrogates import AffineLowThrustModel, HighThrustModel
from trajmodels.vehicles import CrewVehicleSpec, VehicleSpec

logger = logging.getLogger(__name__)

SEP_ARCS = ['GTO to L1', 'L1 to LLO', 'LLO to L1', 'L1 to GTO',
            'GTO to L2', 'L2 to LLO', 'LLO to L2', 'L2 to GTO']
SEP_TYPES = ['SEP type 1', 'SEP type 2', 'SEP type 3']
CP_ARCS = ['LEO to/from L1', 'L1 to/from LLO', 'LEO to/from L2', 'L2 to/from LLO']
CREW_ARCS = ['LEO to TLI', 'TLI to LLO', 'LEO to TL1I', 'TL1I to L1', 'L1 to LLO',
             'LEO to TL2I', 'TL2I to L2', 'L2 to LLO', 'LLO to ES', 'LLO to L1',
             'L1 to ES', 'LLO to L2', 'L2 to ES']
CREW_VEHICLES = ['US', 'CSM', 'LM']

# SEP fit tables scale the type-1 ¹q column; the multiplier restores days per tonne
TOF_SCALE_BY_TYPE = {'SEP type 1': config.SEP_TYPE1_TOF_SCALE}

TABLE_COLUMNS = {
    'tugs.csv': ['type', 'propulsion', 'dry_mass_t', 'propellant_capacity_t', 'power_kw',
                 'isp_s', 'units', 'unit_names'],
    'crew_vehicles.csv': ['name', 'dry_mass_t', 'propellant_capacity_t', 'isp_s',
                          'structural_coefficient', 'fuel_commodity'],
    'sep_final_mass.csv': ['arc', 'sep_type', 'p1', 'p0_t'],
    'sep_tof.csv': ['arc', 'sep_type', 'q1_printed', 'q0_days'],
    'cp_tug_arcs.csv': ['arc', 'delta_v_kms', 'tof_days'],
    'crew_arcs.csv': ['arc', 'delta_v_kms', 'tof_days', 'stage'],
}

SEP_P1_ENVELOPE = (0.8, 1.0)


def table_label(node: str) -> str:
    """Map a network node id to the label used in the fit tables (EML1 -> L1)."""
    return {'EML1': 'L1', 'EML2': 'L2'}.get(node, node)


def arc_label(origin: str, destination: str) -> str:
    return f"{table_label(origin)} to {table_label(destination)}"


@dataclass(frozen=True)
class CrewArc:
    """A crew trajectory leg and the stage that provides its impulse."""

    label: str
    stage: str
    model: HighThrustModel

    @property
    def delta_v_kms(self) -> float:
        return self.model.delta_v_kms

    @property
    def tof_days(self) -> float:
        return self.model.tof_days


class TrajectoryRegistry:
    """
    Read-only collection of every surrogate and vehicle specification of the case study.

    Lookups:
        registry['L2 to GTO', 'SEP type 1'] -> AffineLowThrustModel
        registry['L1 to/from LLO', 'CP']    -> HighThrustModel
        registry.crew['LLO to ES']          -> CrewArc
    """

    def __init__(self, tugs: Dict[str, VehicleSpec], crew_vehicles: Dict[str, CrewVehicleSpec],
                 sep_models: Dict[Tuple[str, str], AffineLowThrustModel],
                 cp_arcs: Dict[str, Tuple[float, float]], crew_arcs: Dict[str, Tuple[float, float, str]],
                 g0: Optional[float] = None, unit_overrides: Optional[Dict[str, VehicleSpec]] = None,
                 checksums: Optional[Dict[str, str]] = None):
        self.g0 = config.STANDARD_GRAVITY if g0 is None else float(g0)
        self.tugs = MappingProxyType(dict(tugs))
        self.crew_vehicles = MappingProxyType(dict(crew_vehicles))
        self.sep_models = MappingProxyType(dict(sep_models))
        self._cp_arcs = dict(cp_arcs)
        self.checksums = MappingProxyType(dict(checksums or {}))

        units = {}
        for spec in tugs.values():
            for unit in spec.unit_names:
                units[unit] = spec
        units.update(unit_overrides or {})
        self.units = MappingProxyType(units)

        crew = {}
        for label, (delta_v, tof, stage) in crew_arcs.items():
            if stage not in crew_vehicles:
                raise SchemaError(f"Crew arc '{label}' uses unknown stage '{stage}'")
            crew[label] = CrewArc(label, stage, HighThrustModel(delta_v, crew_vehicles[stage].isp_s, tof, self.g0))
        self.crew = MappingProxyType(crew)

    def __getitem__(self, key):
        arc, vehicle_type = key
        if vehicle_type in SEP_TYPES:
            try:
                return self.sep_models[(arc, vehicle_type)]
            except KeyError:
                raise MissingRow('sep_final_mass.csv', key) from None
        if vehicle_type == 'CP' or vehicle_type in self.tugs:
            isp = self.tugs['CP-1'].isp_s if vehicle_type == 'CP' else self.tugs[vehicle_type].isp_s
            return self.cp_model(arc, isp)
        raise KeyError(key)

    def cp_model(self, arc: str, isp_s: float) -> HighThrustModel:
        """High-thrust tug model for a 'X to/from Y' or directed 'X to Y' label."""
        label = arc if arc in self._cp_arcs else self._cp_label(arc)
        if label is None:
            raise MissingRow('cp_tug_arcs.csv', arc)
        delta_v, tof = self._cp_arcs[label]
        return HighThrustModel(delta_v, isp_s, tof, self.g0)

    def _cp_label(self, directed: str) -> Optional[str]:
        try:
            origin, destination = directed.split(' to ')
        except ValueError:
            return None
        for candidate in (f"{origin} to/from {destination}", f"{destination} to/from {origin}"):
            if candidate in self._cp_arcs:
                return candidate
        return None

    def tug_model(self, unit: str, origin: str, destination: str):
        """Surrogate for a tug unit flying origin -> destination (network node ids)."""
        spec = self.unit_spec(unit)
        label = arc_label(origin, destination)
        if spec.propulsion == 'CP':
            return self.cp_model(label, spec.isp_s)
        return self[label, spec.sep_type]

    def crew_arc(self, label: str) -> CrewArc:
        try:
            return self.crew[label]
        except KeyError:
            raise MissingRow('crew_arcs.csv', label) from None

    def unit_spec(self, unit: str) -> VehicleSpec:
        try:
            return self.units[unit]
        except KeyError:
            raise MissingRow('tugs.csv', unit) from None

    def unit_names(self) -> List[str]:
        """All tug unit names in table order."""
        return [unit for spec in self.tugs.values() for unit in spec.unit_names]

    def tof_slope(self, arc: str, sep_type: str) -> float:
        """Effective ¹q in days per tonne."""
        return self[arc, sep_type].q1_days_per_t

    def tof_power_ordering_violations(self) -> List[str]:
        """
        Check that at equal mass the lower-power SEP types have the steeper TOF slope.

        Returns:
            List[str]: One message per arc where the ordering breaks
        """
        violations = []
        for arc in SEP_ARCS:
            slopes = [self.tof_slope(arc, sep_type) for sep_type in SEP_TYPES]
            if not all(a > b for a, b in zip(slopes, slopes[1:])):
                violations.append(f"{arc}: ¹q by SEP type = {slopes}")
        return violations


def _file_digest(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, 'rb') as handle:
        for chunk in iter(lambda: handle.read(65536), b''):
            digest.update(chunk)
    return digest.hexdigest()


def verify_checksums(tables_dir: str) -> Dict[str, str]:
    """
    Compare each table against checksums.json.

    Mismatches are logged as warnings, not raised.

    Returns:
        Dict[str, str]: Actual SHA-256 digest per table file
    """
    actual = {name: _file_digest(os.path.join(tables_dir, name))
              for name in TABLE_COLUMNS if os.path.exists(os.path.join(tables_dir, name))}
    manifest_path = os.path.join(tables_dir, 'checksums.json')
    if not os.path.exists(manifest_path):
        logger.warning(f"No checksums.json in {tables_dir}; skipping table verification")
        return actual
    with open(manifest_path, 'r', encoding='utf-8') as handle:
        expected = json.load(handle)
    for name, digest in actual.items():
        if expected.get(name) != digest:
            logger.warning(f"Checksum mismatch for {name}: table differs from the recorded version")
    return actual


def _read_table(tables_dir: str, name: str) -> pd.DataFrame:
    path = os.path.join(tables_dir, name)
    if not os.path.exists(path):
        raise SchemaError(f"Missing data table {path}")
    df = pd.read_csv(path, skipinitialspace=True)
    missing = [col for col in TABLE_COLUMNS[name] if col not in df.columns]
    if missing:
        raise SchemaError(f"Table '{name}' is missing columns: {', '.join(missing)}")
    return df


def _optional(value) -> Optional[float]:
    return None if pd.isna(value) else float(value)


def _load_tugs(tables_dir: str) -> Dict[str, VehicleSpec]:
    tugs = {}
    for row in _read_table(tables_dir, 'tugs.csv').itertuples(index=False):
        names = tuple(str(row.unit_names).split(';')) if not pd.isna(row.unit_names) else ()
        tugs[row.type] = VehicleSpec(
            name=row.type, propulsion=row.propulsion, dry_mass_t=float(row.dry_mass_t),
            propellant_capacity_t=float(row.propellant_capacity_t), isp_s=float(row.isp_s),
            units=int(row.units), unit_names=names, power_kw=_optional(row.power_kw))
    return tugs


def _load_crew_vehicles(tables_dir: str) -> Dict[str, CrewVehicleSpec]:
    crew = {}
    for row in _read_table(tables_dir, 'crew_vehicles.csv').itertuples(index=False):
        crew[row.name] = CrewVehicleSpec(
            name=row.name, isp_s=float(row.isp_s), fuel_commodity=row.fuel_commodity,
            dry_mass_t=_optional(row.dry_mass_t), propellant_capacity_t=_optional(row.propellant_capacity_t),
            structural_coefficient=_optional(row.structural_coefficient))
    for name in CREW_VEHICLES:
        if name not in crew:
            raise MissingRow('crew_vehicles.csv', name)
    return crew


def _load_sep_models(tables_dir: str) -> Dict[Tuple[str, str], AffineLowThrustModel]:
    mass = _read_table(tables_dir, 'sep_final_mass.csv').set_index(['arc', 'sep_type'])
    tof = _read_table(tables_dir, 'sep_tof.csv').set_index(['arc', 'sep_type'])
    low, high = SEP_P1_ENVELOPE
    models = {}
    for arc in SEP_ARCS:
        for sep_type in SEP_TYPES:
            key = (arc, sep_type)
            if key not in mass.index:
                raise MissingRow('sep_final_mass.csv', key)
            if key not in tof.index:
                raise MissingRow('sep_tof.csv', key)
            p1 = float(mass.at[key, 'p1'])
            if not low < p1 < high:
                raise SchemaError(f"¹p = {p1} for {key} outside the envelope ({low}, {high})")
            q1 = float(tof.at[key, 'q1_printed']) * TOF_SCALE_BY_TYPE.get(sep_type, 1.0)
            models[key] = AffineLowThrustModel(p1, float(mass.at[key, 'p0_t']), q1, float(tof.at[key, 'q0_days']))
    return models


def _load_arc_table(tables_dir: str, name: str, required: List[str], with_stage: bool) -> Dict[str, Tuple]:
    df = _read_table(tables_dir, name)
    rows = {}
    for row in df.itertuples(index=False):
        values = (float(row.delta_v_kms), float(row.tof_days))
        rows[row.arc] = values + ((row.stage,) if with_stage else ())
    for label in required:
        if label not in rows:
            raise MissingRow(name, label)
    return rows


def _apply_overrides(tugs: Dict[str, VehicleSpec], crew_vehicles: Dict[str, CrewVehicleSpec],
                     overrides: Optional[Mapping[str, Mapping[str, Any]]]):
    """Split overrides into type-level replacements and per-unit copies."""
    unit_overrides = {}
    for name, changes in (overrides or {}).items():
        if name in tugs:
            tugs[name] = tugs[name].with_overrides(**changes)
        elif name in crew_vehicles:
            crew_vehicles[name] = crew_vehicles[name].with_overrides(**changes)
        else:
            owner = next((spec for spec in tugs.values() if name in spec.unit_names), None)
            if owner is None:
                raise SchemaError(f"Override target '{name}' is not a known vehicle or tug unit")
            logger.info(f"Override on unit {name}: {dict(changes)}")
            unit_overrides[name] = owner.with_overrides(**changes)
    return unit_overrides


def load_fit_tables(tables_dir: Optional[str] = None, verify: bool = True,
                    overrides: Optional[Mapping[str, Mapping[str, Any]]] = None,
                    g0: Optional[float] = None) -> TrajectoryRegistry:
    """
    Load every fit table into an immutable registry.

    Args:
        tables_dir: Directory holding the CSV tables. Defaults to config.TABLES_DIR.
        verify: Compare the files against checksums.json
        overrides: Per vehicle type or tug unit field replacements,
            e.g. {'tug2': {'propellant_capacity_t': 5}}
        g0: Standard gravity for the high-thrust models

    Returns:
        TrajectoryRegistry: Loaded registry

    Raises:
        SchemaError: A table is missing, lacks columns or holds out-of-envelope values
        MissingRow: A required arc or vehicle row is absent
    """
    tables_dir = tables_dir or config.TABLES_DIR
    checksums = verify_checksums(tables_dir) if verify else {}

    tugs = _load_tugs(tables_dir)
    crew_vehicles = _load_crew_vehicles(tables_dir)
    unit_overrides = _apply_overrides(tugs, crew_vehicles, overrides)
    registry = TrajectoryRegistry(
        tugs=tugs,
        crew_vehicles=crew_vehicles,
        sep_models=_load_sep_models(tables_dir),
        cp_arcs=_load_arc_table(tables_dir, 'cp_tug_arcs.csv', CP_ARCS, with_stage=False),
        crew_arcs=_load_arc_table(tables_dir, 'crew_arcs.csv', CREW_ARCS, with_stage=True),
        g0=g0,
        unit_overrides=unit_overrides,
        checksums=checksums,
    )
    logger.info(f"Loaded fit tables from {tables_dir}: {len(registry.sep_models)} SEP models, "
                f"{len(registry.crew)} crew arcs, {len(registry.units)} tug units")
    return registry
