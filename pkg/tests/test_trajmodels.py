"""
Unit tests for the trajectory surrogates and the fit-table registry
"""

import math
import os
import shutil
import sys
import tempfile
import unittest

import numpy as np

# Add parent directory to path to import modules
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import config
from trajmodels import (
    AffineLowThrustModel,
    BadBreakpoints,
    DomainError,
    HighThrustModel,
    IdentityTransfer,
    MissingRow,
    PwlModel,
    SchemaError,
    gto_launch_penalty,
    load_fit_tables,
    rocket_mass_ratio,
    sep_final_mass,
    sep_tof,
    spiral_tof,
    spiral_tof_days,
    surrogate_from_dict,
    table_label,
    validate_breakpoints,
)

MU_EARTH = 398600.4418


class TestRocketEquation(unittest.TestCase):
    """Test cases for the high-thrust mass ratio"""

    def test_ratio_matches_closed_form(self):
        ratio = rocket_mass_ratio(3.306, 421, g0=9.80665)
        self.assertAlmostEqual(ratio, math.exp(-3306.0 / (9.80665 * 421)), places=12)

    def test_zero_delta_v_is_unity(self):
        self.assertEqual(rocket_mass_ratio(0.0, 300), 1.0)

    def test_ratio_decreases_with_delta_v(self):
        ratios = [rocket_mass_ratio(dv, 450) for dv in (0.5, 1.0, 2.0, 4.0)]
        self.assertTrue(all(a > b for a, b in zip(ratios, ratios[1:])))

    def test_invalid_inputs(self):
        with self.assertRaises(DomainError):
            rocket_mass_ratio(1.0, 0)
        with self.assertRaises(DomainError):
            rocket_mass_ratio(-0.1, 300)
        with self.assertRaises(DomainError):
            HighThrustModel(1.0, -5)

    def test_gto_penalty(self):
        """The LEO to GTO transfer costs about 1.74 kg at LEO per kg at GTO"""
        self.assertAlmostEqual(gto_launch_penalty(), 1.744, delta=0.001)
        self.assertAlmostEqual(gto_launch_penalty(), config.LaunchCosts.GTO, delta=0.01)

    def test_high_thrust_model(self):
        model = HighThrustModel(0.259, 450, tof_days=28)
        p1, p0 = model.mass_coefficients()
        self.assertAlmostEqual(p1, model.ratio)
        self.assertEqual(p0, 0.0)
        self.assertEqual(model.time_of_flight(12000.0), 28.0)
        self.assertAlmostEqual(model.final_mass(1000.0), 1000.0 * model.ratio)

    def test_identity_transfer(self):
        identity = IdentityTransfer()
        self.assertEqual(identity.final_mass(1234.5), 1234.5)
        self.assertEqual(identity.time_of_flight(1234.5), 0.0)


class TestLowThrustModels(unittest.TestCase):
    """Test cases for the fitted affine and piecewise-linear surrogates"""

    def setUp(self):
        self.model = AffineLowThrustModel(0.8757, -0.0038, 25.98, 26.631)

    def test_sep_final_mass_in_tonnes(self):
        self.assertAlmostEqual(sep_final_mass(self.model, 20.0, 1), 0.8757 * 20.0 - 0.0038)
        self.assertEqual(sep_final_mass(self.model, 0.0, 0), 0.0)

    def test_sep_tof_in_days(self):
        self.assertAlmostEqual(sep_tof(self.model, 10.0, 1), 25.98 * 10.0 + 26.631)

    def test_model_units_are_kilograms(self):
        p1, p0 = self.model.mass_coefficients()
        self.assertEqual(p1, 0.8757)
        self.assertAlmostEqual(p0, -3.8)
        q1, q0 = self.model.time_coefficients()
        self.assertAlmostEqual(q1, 0.02598)
        self.assertAlmostEqual(self.model.final_mass(20000.0), sep_final_mass(self.model, 20.0, 1) * 1000.0)

    def test_absent_vehicle_carries_nothing(self):
        with self.assertRaises(DomainError):
            sep_final_mass(self.model, 5.0, 0)
        with self.assertRaises(DomainError):
            sep_tof(self.model, 1.0, 2)

    def test_p1_outside_unit_interval(self):
        with self.assertRaises(DomainError):
            AffineLowThrustModel(1.2, 0.0)

    def test_pwl_interpolation(self):
        pwl = PwlModel((0.0, 1000.0, 3000.0), (0.0, 900.0, 2500.0), (10.0, 20.0, 40.0))
        self.assertFalse(pwl.is_affine)
        self.assertAlmostEqual(pwl.final_mass(500.0), 450.0)
        self.assertAlmostEqual(pwl.final_mass(2000.0), 1700.0)
        self.assertAlmostEqual(pwl.time_of_flight(2000.0), 30.0)
        with self.assertRaises(DomainError):
            pwl.final_mass(3500.0)

    def test_pwl_matches_numpy_on_random_points(self):
        rng = np.random.default_rng(7)
        breakpoints = np.cumsum(rng.uniform(100.0, 500.0, size=6))
        values = np.sqrt(breakpoints) * 10.0
        pwl = PwlModel(tuple(breakpoints), tuple(values))
        for mass in rng.uniform(breakpoints[0], breakpoints[-1], size=20):
            self.assertAlmostEqual(pwl.final_mass(mass), float(np.interp(mass, breakpoints, values)))

    def test_bad_breakpoints(self):
        with self.assertRaises(BadBreakpoints):
            validate_breakpoints([1.0])
        with self.assertRaises(BadBreakpoints):
            validate_breakpoints([0.0, 2.0, 2.0])
        with self.assertRaises(BadBreakpoints):
            PwlModel((0.0, 1.0), (0.0,))

    def test_surrogate_serialization(self):
        pwl = PwlModel((0.0, 10.0), (0.0, 9.0), (1.0, 2.0))
        self.assertEqual(surrogate_from_dict(pwl.to_dict()), pwl)
        self.assertEqual(surrogate_from_dict(self.model.to_dict()), self.model)
        with self.assertRaises(ValueError):
            surrogate_from_dict({'kind': 'warp_drive'})


class TestSpiralOracle(unittest.TestCase):
    """Test cases for the tangential-thrust time-of-flight oracle"""

    def test_inverse_in_thrust_acceleration(self):
        slow = spiral_tof(1e-7, MU_EARTH, 6678.0, 42164.0)
        fast = spiral_tof(2e-7, MU_EARTH, 6678.0, 42164.0)
        self.assertAlmostEqual(slow / fast, 2.0, places=12)

    def test_closed_form(self):
        expected = (math.sqrt(MU_EARTH / 6678.0) - math.sqrt(MU_EARTH / 42164.0)) / 1e-7
        self.assertAlmostEqual(spiral_tof(1e-7, MU_EARTH, 6678.0, 42164.0), expected)
        self.assertAlmostEqual(spiral_tof_days(1e-7, MU_EARTH, 6678.0, 42164.0), expected / 86400.0)

    def test_same_orbit_takes_no_time(self):
        self.assertEqual(spiral_tof(1e-7, MU_EARTH, 7000.0, 7000.0), 0.0)

    def test_invalid_inputs(self):
        with self.assertRaises(DomainError):
            spiral_tof(0.0, MU_EARTH, 6678.0, 42164.0)
        with self.assertRaises(DomainError):
            spiral_tof(1e-7, MU_EARTH, 42164.0, 6678.0)


class TestFitTables(unittest.TestCase):
    """Test cases for load_fit_tables and the registry lookups"""

    @classmethod
    def setUpClass(cls):
        cls.registry = load_fit_tables()

    def test_units(self):
        self.assertEqual(self.registry.unit_names(), [f"tug{i}" for i in range(1, 13)])
        self.assertEqual(self.registry.unit_spec('tug7').name, 'CP-3')
        self.assertEqual(self.registry.unit_spec('tug12').propulsion, 'SEP')
        self.assertEqual(self.registry.unit_spec('tug12').fuel_commodity, 'fLOW')
        self.assertEqual(self.registry.unit_spec('tug1').fuel_commodity, 'fHIGH')
        with self.assertRaises(MissingRow):
            self.registry.unit_spec('tug13')

    def test_chemical_tug_arc(self):
        model = self.registry.tug_model('tug7', 'LEO', 'EML2')
        self.assertIsInstance(model, HighThrustModel)
        self.assertEqual(model.delta_v_kms, 3.336)
        self.assertEqual(model.tof_days, 17.0)
        reverse = self.registry.tug_model('tug7', 'EML2', 'LEO')
        self.assertEqual(reverse.delta_v_kms, model.delta_v_kms)

    def test_electric_tug_arc(self):
        model = self.registry.tug_model('tug12', 'GTO', 'EML1')
        self.assertIsInstance(model, AffineLowThrustModel)
        self.assertEqual(model.p1, 0.8251)
        self.assertEqual(model.p0_t, 0.2401)

    def test_type1_tof_slope_is_rescaled(self):
        self.assertAlmostEqual(self.registry.tof_slope('GTO to L1', 'SEP type 1'), 25.98)
        self.assertAlmostEqual(self.registry.tof_slope('GTO to L1', 'SEP type 2'), 6.832)

    def test_tof_slope_ordering_by_power(self):
        self.assertEqual(self.registry.tof_power_ordering_violations(), [])

    def test_crew_arcs(self):
        leg = self.registry.crew_arc('LLO to ES')
        self.assertEqual(leg.stage, 'CSM')
        self.assertEqual(leg.tof_days, 3.0)
        self.assertEqual(self.registry.crew_arc('LEO to TLI').stage, 'US')
        upper_stage = self.registry.crew_vehicles['US']
        self.assertAlmostEqual(upper_stage.eps_hat, 0.1138 / (1 - 0.1138))
        self.assertIsNone(upper_stage.dry_mass_kg)

    def test_table_labels(self):
        self.assertEqual(table_label('EML1'), 'L1')
        self.assertEqual(table_label('LEO'), 'LEO')

    def test_checksums_recorded(self):
        self.assertIn('tugs.csv', self.registry.checksums)

    def test_unit_override(self):
        registry = load_fit_tables(overrides={'tug2': {'propellant_capacity_t': 5}})
        self.assertEqual(registry.unit_spec('tug2').propellant_capacity_kg, 5000.0)
        self.assertEqual(registry.unit_spec('tug1').propellant_capacity_kg, 11500.0)

    def test_unknown_override_target(self):
        with self.assertRaises(SchemaError):
            load_fit_tables(overrides={'tug99': {'dry_mass_t': 1}})

    def test_custom_gravity(self):
        registry = load_fit_tables(g0=9.81)
        self.assertEqual(registry.g0, 9.81)
        self.assertEqual(registry.crew_arc('LLO to ES').model.g0, 9.81)


class TestBrokenTables(unittest.TestCase):
    """Test cases for schema checks on modified copies of the tables"""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.tables = os.path.join(self.temp_dir, 'tables')
        shutil.copytree(config.TABLES_DIR, self.tables)

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def _rewrite(self, name, transform):
        path = os.path.join(self.tables, name)
        with open(path, 'r') as f:
            lines = f.read().splitlines()
        with open(path, 'w') as f:
            f.write('\n'.join(transform(lines)) + '\n')

    def test_missing_column(self):
        self._rewrite('cp_tug_arcs.csv', lambda lines: [line.rsplit(',', 1)[0] for line in lines])
        with self.assertRaises(SchemaError):
            load_fit_tables(self.tables, verify=False)

    def test_missing_crew_arc(self):
        self._rewrite('crew_arcs.csv', lambda lines: [line for line in lines if not line.startswith('LLO to ES')])
        with self.assertRaises(MissingRow):
            load_fit_tables(self.tables, verify=False)

    def test_p1_outside_envelope(self):
        self._rewrite('sep_final_mass.csv',
                      lambda lines: [line.replace('0.8757', '0.7000') for line in lines])
        with self.assertRaises(SchemaError):
            load_fit_tables(self.tables, verify=False)

    def test_checksum_mismatch_only_warns(self):
        self._rewrite('tugs.csv', lambda lines: [line.replace('CP-1,CP,2.3,', 'CP-1,CP,2.30,') for line in lines])
        with self.assertLogs('trajmodels.registry', level='WARNING') as logs:
            load_fit_tables(self.tables, verify=True)
        self.assertTrue(any('Checksum mismatch' in line for line in logs.output))


if __name__ == '__main__':
    unittest.main()
