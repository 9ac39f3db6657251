"""
Unit tests for the Pareto sweep over time bounds
"""

import os
import shutil
import sys
import tempfile
import unittest
from types import SimpleNamespace
from unittest.mock import patch

from diskcache import FanoutCache

# Add parent directory to path to import modules
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from cislunar import CampaignConfig, ConfigError, SweepPoint, baseline_bounds, pareto_sweep, rate_savings, solve_point

REGISTRY = SimpleNamespace(checksums={'tugs.csv': 'a1b2'})


def fake_objective(t_cargo, t_crew):
    return 500000.0 - 1000.0 * t_cargo - 2000.0 * t_crew


def fake_solve(campaign, t_cargo, t_crew, registry):
    return SweepPoint(t_cargo, t_crew, 'optimal', objective_kg=fake_objective(t_cargo, t_crew), gap=0.0,
                      nodes=3, tugs_used=1, tug_uses={'tug2': 1})


class TestParetoSweep(unittest.TestCase):
    """Test cases for pareto_sweep with the solver patched out"""

    def setUp(self):
        self.campaign = CampaignConfig(name='sweep')
        patcher = patch('cislunar.sweep.solve_point', side_effect=fake_solve)
        self.solve = patcher.start()
        self.addCleanup(patcher.stop)

    def test_baseline_bounds(self):
        self.assertEqual(baseline_bounds(self.campaign), (0.0, 21.0))
        self.assertEqual(baseline_bounds(CampaignConfig(missions=2, t_crew_days=30.0)), (0.0, 14.0))

    def test_savings_against_baseline(self):
        points = pareto_sweep(self.campaign, [(0.0, 21.0), (120.0, 30.0)], REGISTRY, use_cache=False)
        self.assertEqual(self.solve.call_count, 2)
        self.assertEqual(points[0].savings_pct, 0.0)
        baseline = fake_objective(0.0, 21.0)
        expected = 100.0 * (baseline - fake_objective(120.0, 30.0)) / baseline
        self.assertAlmostEqual(points[1].savings_pct, expected)

    def test_baseline_solved_when_off_grid(self):
        points = pareto_sweep(self.campaign, [(120.0, 30.0)], REGISTRY, use_cache=False)
        self.assertEqual(len(points), 1)
        self.assertEqual(self.solve.call_count, 2)
        self.assertGreater(points[0].savings_pct, 0.0)

    def test_sorted_by_crew_then_cargo(self):
        grid = [(240.0, 30.0), (0.0, 30.0), (120.0, 21.0), (0.0, 30.0)]
        points = pareto_sweep(self.campaign, grid, REGISTRY, use_cache=False)
        self.assertEqual([p.bounds for p in points], [(120.0, 21.0), (0.0, 30.0), (240.0, 30.0)])

    def test_parallel_workers_match_serial(self):
        grid = [(0.0, 21.0), (120.0, 21.0), (0.0, 40.0), (240.0, 50.0)]
        serial = pareto_sweep(self.campaign, grid, REGISTRY, use_cache=False)
        parallel = pareto_sweep(self.campaign, grid, REGISTRY, workers=3, use_cache=False)
        self.assertEqual([p.to_dict() for p in serial], [p.to_dict() for p in parallel])

    def test_empty_grid(self):
        with self.assertRaises(ValueError):
            pareto_sweep(self.campaign, [], REGISTRY, use_cache=False)

    def test_errors_are_recorded(self):
        def failing(campaign, t_cargo, t_crew, registry):
            if t_cargo == 480.0:
                return SweepPoint(t_cargo, t_crew, 'error', message='boom')
            return fake_solve(campaign, t_cargo, t_crew, registry)

        self.solve.side_effect = failing
        points = pareto_sweep(self.campaign, [(0.0, 21.0), (480.0, 50.0)], REGISTRY, use_cache=False)
        self.assertEqual(points[1].status, 'error')
        self.assertIsNone(points[1].savings_pct)
        self.assertEqual(points[1].message, 'boom')

    def test_non_monotone_points_warn(self):
        def bumpy(campaign, t_cargo, t_crew, registry):
            objective = 600000.0 if t_cargo == 120.0 else fake_objective(t_cargo, t_crew)
            return SweepPoint(t_cargo, t_crew, 'optimal', objective_kg=objective)

        self.solve.side_effect = bumpy
        with self.assertLogs('cislunar.sweep', level='WARNING'):
            pareto_sweep(self.campaign, [(0.0, 21.0), (120.0, 21.0)], REGISTRY, use_cache=False)


class TestSweepCache(unittest.TestCase):
    """Test cases for sweep points served from the solution cache"""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.cache = FanoutCache(self.temp_dir, shards=2)
        cache_patcher = patch('cache_config.cache', self.cache)
        cache_patcher.start()
        self.addCleanup(cache_patcher.stop)
        solve_patcher = patch('cislunar.sweep.solve_point', side_effect=fake_solve)
        self.solve = solve_patcher.start()
        self.addCleanup(solve_patcher.stop)
        self.campaign = CampaignConfig(name='cached')

    def tearDown(self):
        self.cache.close()
        shutil.rmtree(self.temp_dir)

    def test_second_sweep_hits(self):
        grid = [(0.0, 21.0), (120.0, 30.0)]
        first = pareto_sweep(self.campaign, grid, REGISTRY)
        second = pareto_sweep(self.campaign, grid, REGISTRY)
        self.assertEqual(self.solve.call_count, 2)
        self.assertFalse(any(p.cached for p in first))
        self.assertTrue(all(p.cached for p in second))
        self.assertEqual([p.objective_kg for p in first], [p.objective_kg for p in second])

    def test_changed_tables_miss(self):
        grid = [(0.0, 21.0)]
        pareto_sweep(self.campaign, grid, REGISTRY)
        pareto_sweep(self.campaign, grid, SimpleNamespace(checksums={'tugs.csv': 'c3d4'}))
        self.assertEqual(self.solve.call_count, 2)

    def test_error_points_are_not_stored(self):
        self.solve.side_effect = lambda campaign, t_cargo, t_crew, registry: SweepPoint(t_cargo, t_crew, 'error')
        pareto_sweep(self.campaign, [(0.0, 21.0)], REGISTRY)
        pareto_sweep(self.campaign, [(0.0, 21.0)], REGISTRY)
        self.assertEqual(self.solve.call_count, 2)
        self.assertEqual(len(self.cache), 0)


class TestSolvePoint(unittest.TestCase):
    """Test cases for solve_point failure handling and rate_savings"""

    @patch('cislunar.sweep.assemble_campaign', side_effect=ConfigError('no tugs'))
    def test_build_failure_becomes_error_point(self, mock_assemble):
        point = solve_point(CampaignConfig(), 0.0, 21.0, REGISTRY)
        self.assertEqual(point.status, 'error')
        self.assertEqual(point.message, 'no tugs')
        self.assertFalse(point.solved)
        mock_assemble.assert_called_once()

    def test_unsolved_baseline_skips_rating(self):
        points = [SweepPoint(120.0, 30.0, 'optimal', objective_kg=300000.0)]
        with self.assertLogs('cislunar.sweep', level='WARNING'):
            rate_savings(points, SweepPoint(0.0, 21.0, 'infeasible'))
        self.assertIsNone(points[0].savings_pct)


if __name__ == '__main__':
    unittest.main()
