"""
Unit tests for the presolve, revised simplex and branch-and-bound solver
"""

import itertools
import json
import os
import shutil
import sys
import tempfile
import unittest
from unittest.mock import patch

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

# Add parent directory to path to import modules
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from milpcore import MilpModel, VarKind
from simplexbb import (
    GAP_LIMIT,
    INFEASIBLE,
    OPTIMAL,
    TIME_LIMIT,
    UNBOUNDED,
    BnbNode,
    BranchAndBoundOptions,
    LpData,
    NumericalBreakdown,
    RevisedSimplex,
    SimplexOptions,
    SolveResult,
    branch_sos2,
    equilibrate,
    is_sos2_feasible,
    presolve,
    solve_lp,
    solve_milp,
    solve_relaxation,
    sos2_split_point,
    write_report,
)


def random_feasible_lp(rng, n=4, m=3):
    """Random LP with a known interior point, as (MilpModel, scipy arguments)."""
    A = rng.uniform(0.5, 2.0, size=(m, n))
    x0 = rng.uniform(0.0, 5.0, size=n)
    b = A @ x0 + rng.uniform(0.1, 2.0, size=m)
    e = rng.uniform(0.5, 1.5, size=n)
    g = rng.uniform(0.5, 1.5, size=n)
    c = rng.uniform(-3.0, 1.0, size=n)

    model = MilpModel('random_lp')
    ids = [model.add_variable(f"x{j}", upper=10.0) for j in range(n)]
    for i in range(m):
        model.add_constraint(f"le{i}", dict(zip(ids, A[i])), '<=', float(b[i]))
    model.add_constraint('eq', dict(zip(ids, e)), '=', float(e @ x0))
    model.add_constraint('ge', dict(zip(ids, g)), '>=', float(g @ x0) - 1.0)
    model.add_objective_terms(dict(zip(ids, c)))
    model.freeze()
    scipy_args = dict(c=c, A_ub=np.vstack([A, -g]), b_ub=np.append(b, -(g @ x0 - 1.0)),
                      A_eq=e.reshape(1, -1), b_eq=[e @ x0], bounds=[(0.0, 10.0)] * n, method='highs')
    return model, scipy_args


def knapsack(weights, values, capacity, kind=VarKind.BINARY):
    model = MilpModel('knapsack')
    ids = [model.add_variable(f"item{j}", kind, upper=1.0) for j in range(len(weights))]
    model.add_constraint('capacity', dict(zip(ids, weights)), '<=', float(capacity))
    model.add_objective_terms({var_id: -float(v) for var_id, v in zip(ids, values)})
    return model.freeze()


def badly_scaled_lp(rng, n=5, m=4, spread=3.0):
    """Random <= LP whose rows and columns are scaled by up to 10**spread, as (LpData, scipy arguments)."""
    A0 = rng.uniform(0.5, 2.0, size=(m, n))
    x0 = rng.uniform(0.0, 5.0, size=n)
    b0 = A0 @ x0 + rng.uniform(0.1, 2.0, size=m)
    c0 = rng.uniform(-3.0, 1.0, size=n)
    rows = 10.0 ** rng.uniform(-spread, spread, size=m)
    cols = 10.0 ** rng.uniform(-spread, spread, size=n)
    A = rows[:, None] * A0 * cols[None, :]
    ub = 10.0 / cols
    lp = LpData(c0 * cols, sp.csr_matrix(A), np.array(['L'] * m), rows * b0, np.zeros(n), ub)
    scipy_args = dict(c=c0 * cols, A_ub=A, b_ub=rows * b0, bounds=list(zip(np.zeros(n), ub)), method='highs')
    return lp, scipy_args


def random_box_lp(rng):
    """
    Random LP over the box [0, 10]^n with mixed <= / >= rows and a known feasible point.

    Returns:
        tuple: (LpData, G, h) with the feasible region written as G x <= h
    """
    n = int(rng.integers(2, 4))
    m = int(rng.integers(1, 6))
    A = rng.uniform(-2.0, 3.0, size=(m, n))
    x0 = rng.uniform(0.0, 10.0, size=n)
    slack = rng.uniform(0.0, 3.0, size=m)
    senses = rng.choice(['L', 'G'], size=m)
    rhs = np.where(senses == 'L', A @ x0 + slack, A @ x0 - slack)
    c = rng.uniform(-5.0, 5.0, size=n)
    lp = LpData(c, sp.csr_matrix(A), senses, rhs, np.zeros(n), np.full(n, 10.0))

    sign = np.where(senses == 'L', 1.0, -1.0)
    G = np.vstack([sign[:, None] * A, -np.eye(n), np.eye(n)])
    h = np.concatenate([sign * rhs, np.zeros(n), np.full(n, 10.0)])
    return lp, G, h


def vertex_optimum(c, G, h, tol=1e-7):
    """Best objective over all vertices of {x: G x <= h}."""
    n = len(c)
    best = np.inf
    for rows in itertools.combinations(range(len(h)), n):
        rows = list(rows)
        sub = G[rows]
        if abs(np.linalg.det(sub)) < 1e-9:
            continue
        x = np.linalg.solve(sub, h[rows])
        if np.all(G @ x <= h + tol):
            best = min(best, float(c @ x))
    return best


def random_binary_milp(rng, n=None, m=None):
    """
    Random pure-binary MILP that is feasible by construction.

    Returns:
        tuple: (frozen MilpModel, A, senses, rhs, c) with senses drawn from '<=', '>=', '='
    """
    n = int(rng.integers(4, 15)) if n is None else n
    m = int(rng.integers(1, 31)) if m is None else m
    A = rng.integers(-5, 10, size=(m, n)).astype(float)
    x0 = rng.integers(0, 2, size=n)
    senses = rng.choice(['<=', '>=', '='], size=m, p=[0.45, 0.45, 0.1])
    slack = rng.integers(0, 4, size=m)
    rhs = np.where(senses == '<=', A @ x0 + slack, np.where(senses == '>=', A @ x0 - slack, A @ x0))
    c = rng.integers(-10, 11, size=n).astype(float)

    model = MilpModel('binary')
    ids = [model.add_variable(f"b{j}", VarKind.BINARY, upper=1.0) for j in range(n)]
    for i in range(m):
        model.add_constraint(f"row{i}", dict(zip(ids, A[i])), str(senses[i]), float(rhs[i]))
    model.add_objective_terms(dict(zip(ids, c)))
    return model.freeze(), A, senses, rhs, c


def enumerate_binary_optimum(A, senses, rhs, c):
    n = A.shape[1]
    X = (np.arange(2 ** n)[:, None] >> np.arange(n)) & 1
    activity = X @ A.T
    ok = np.where(senses == '<=', activity <= rhs, np.where(senses == '>=', activity >= rhs, activity == rhs))
    feasible = ok.all(axis=1)
    return float((X[feasible] @ c).min())


class TestSimplex(unittest.TestCase):
    """Test cases for the LP relaxation against scipy's HiGHS"""

    def test_random_lps_match_highs(self):
        rng = np.random.default_rng(2024)
        for _ in range(10):
            model, scipy_args = random_feasible_lp(rng)
            expected = linprog(**scipy_args)
            self.assertEqual(expected.status, 0)
            result = solve_relaxation(model)
            self.assertEqual(result.status, OPTIMAL)
            self.assertAlmostEqual(result.objective, expected.fun, places=6)

    def test_lp_vertex(self):
        """max x + y s.t. x + 2y <= 4, 3x + y <= 6 has its optimum at (1.6, 1.2)"""
        model = MilpModel('vertex')
        x = model.add_variable('x')
        y = model.add_variable('y')
        model.add_constraint('c1', {x: 1.0, y: 2.0}, '<=', 4.0)
        model.add_constraint('c2', {x: 3.0, y: 1.0}, '<=', 6.0)
        model.add_objective_terms({x: -1.0, y: -1.0})
        result = solve_relaxation(model.freeze())
        np.testing.assert_allclose(result.x, [1.6, 1.2], atol=1e-9)
        self.assertAlmostEqual(result.objective, -2.8)

    def test_infeasible_lp(self):
        model = MilpModel('infeasible')
        x = model.add_variable('x', upper=1.0)
        y = model.add_variable('y', upper=1.0)
        model.add_constraint('cover', {x: 1.0, y: 1.0}, '>=', 5.0)
        self.assertEqual(solve_relaxation(model.freeze()).status, INFEASIBLE)

    def test_unbounded_lp(self):
        model = MilpModel('unbounded')
        x = model.add_variable('x')
        y = model.add_variable('y')
        model.add_constraint('diff', {x: 1.0, y: -1.0}, '<=', 1.0)
        model.add_objective_terms({x: -1.0})
        self.assertEqual(solve_milp(model.freeze()).status, UNBOUNDED)

    def test_solve_lp_on_raw_data(self):
        lp = LpData(np.array([1.0, 1.0]), sp.csr_matrix(np.array([[1.0, 1.0]])), np.array(['G']),
                    np.array([3.0]), np.zeros(2), np.array([2.0, 2.0]))
        result = solve_lp(lp)
        self.assertTrue(result.is_optimal)
        self.assertAlmostEqual(result.objective, 3.0)

    def test_unbounded_ray(self):
        """min -x - y s.t. x - y <= 1: after x enters, y has no blocking row and no upper bound"""
        lp = LpData(np.array([-1.0, -1.0]), sp.csr_matrix(np.array([[1.0, -1.0]])), np.array(['L']),
                    np.array([1.0]), np.zeros(2), np.full(2, np.inf))
        result = solve_lp(lp)
        self.assertEqual(result.status, UNBOUNDED)
        self.assertIsNone(result.x)

        model = MilpModel('ray')
        x = model.add_variable('x', VarKind.INTEGER)
        y = model.add_variable('y')
        model.add_constraint('diff', {x: 1.0, y: -1.0}, '<=', 1.0)
        model.add_objective_terms({x: -1.0, y: -1.0})
        model.freeze()
        self.assertEqual(solve_relaxation(model).status, UNBOUNDED)
        self.assertEqual(solve_milp(model).status, UNBOUNDED)

    def test_bound_flip_beats_ratio(self):
        """Same ray with y <= 3: y moves to its upper bound and x follows to 4"""
        lp = LpData(np.array([-1.0, -1.0]), sp.csr_matrix(np.array([[1.0, -1.0]])), np.array(['L']),
                    np.array([1.0]), np.zeros(2), np.array([np.inf, 3.0]))
        result = solve_lp(lp)
        self.assertEqual(result.status, OPTIMAL)
        np.testing.assert_allclose(result.x, [4.0, 3.0], atol=1e-9)
        self.assertAlmostEqual(result.objective, -7.0)

    def test_badly_scaled_lps_match_highs(self):
        rng = np.random.default_rng(77)
        for _ in range(10):
            lp, scipy_args = badly_scaled_lp(rng)
            expected = linprog(**scipy_args)
            self.assertEqual(expected.status, 0)
            result = solve_lp(lp)
            self.assertEqual(result.status, OPTIMAL)
            self.assertAlmostEqual(result.objective, expected.fun, delta=1e-5 * max(1.0, abs(expected.fun)))
            self.assertTrue(np.all(lp.A @ result.x <= lp.rhs * (1 + 1e-7) + 1e-7))

    def test_scaling_does_not_change_the_optimum(self):
        rng = np.random.default_rng(5)
        lp, _ = badly_scaled_lp(rng, spread=2.0)
        scaled = solve_lp(lp)
        unscaled = solve_lp(lp, SimplexOptions(scaling_passes=0))
        self.assertEqual(scaled.status, OPTIMAL)
        self.assertAlmostEqual(scaled.objective, unscaled.objective,
                               delta=1e-5 * max(1.0, abs(unscaled.objective)))

    def test_restart_after_breakdown(self):
        lp = LpData(np.array([-1.0, -1.0]), sp.csr_matrix(np.array([[1.0, 2.0], [3.0, 1.0]])),
                    np.array(['L', 'L']), np.array([4.0, 6.0]), np.zeros(2), np.full(2, np.inf))
        original = RevisedSimplex._iterate
        calls = []

        def flaky(simplex, cost, phase):
            calls.append(phase)
            if len(calls) == 1:
                raise NumericalBreakdown('vanishing pivot')
            return original(simplex, cost, phase)

        with patch.object(RevisedSimplex, '_iterate', autospec=True, side_effect=flaky):
            result = solve_lp(lp)
        self.assertEqual(result.status, OPTIMAL)
        self.assertEqual(result.restarts, 1)
        self.assertFalse(result.used_bland)
        self.assertAlmostEqual(result.objective, -2.8)

    def test_breakdown_without_restarts_raises(self):
        lp = LpData(np.array([-1.0]), sp.csr_matrix(np.array([[1.0]])), np.array(['L']), np.array([1.0]),
                    np.zeros(1), np.full(1, np.inf))
        with patch.object(RevisedSimplex, '_iterate', side_effect=NumericalBreakdown('singular')):
            with self.assertRaises(NumericalBreakdown):
                solve_lp(lp, SimplexOptions(max_restarts=0))

    def test_frequent_refactorization(self):
        rng = np.random.default_rng(31)
        for _ in range(5):
            model, scipy_args = random_feasible_lp(rng, n=6, m=5)
            expected = linprog(**scipy_args)
            result = solve_relaxation(model, options=SimplexOptions(refactor_period=1))
            self.assertAlmostEqual(result.objective, expected.fun, places=6)


class TestEquilibrate(unittest.TestCase):
    """Test cases for the power-of-two row and column scaling"""

    def test_factors_are_powers_of_two(self):
        lp, _ = badly_scaled_lp(np.random.default_rng(3))
        scaled, rows, cols = equilibrate(lp)
        np.testing.assert_array_equal(np.log2(rows), np.round(np.log2(rows)))
        np.testing.assert_array_equal(np.log2(cols), np.round(np.log2(cols)))
        np.testing.assert_allclose(scaled.A.toarray(), rows[:, None] * lp.A.toarray() * cols[None, :])
        np.testing.assert_allclose(scaled.ub * cols, lp.ub)

    def test_spread_shrinks(self):
        lp, _ = badly_scaled_lp(np.random.default_rng(4))
        scaled, _, _ = equilibrate(lp)

        def spread(matrix):
            data = np.abs(matrix.data)
            return data.max() / data.min()

        self.assertLess(spread(scaled.A), spread(lp.A))
        self.assertLess(spread(scaled.A), 100.0)

    def test_disabled_or_empty(self):
        lp = LpData(np.ones(2), sp.csr_matrix((1, 2)), np.array(['L']), np.zeros(1), np.zeros(2), np.ones(2))
        scaled, rows, cols = equilibrate(lp)
        self.assertIs(scaled, lp)
        np.testing.assert_array_equal(cols, [1.0, 1.0])
        lp, _ = badly_scaled_lp(np.random.default_rng(4))
        self.assertIs(equilibrate(lp, passes=0)[0], lp)


class TestLpVertexEnumeration(unittest.TestCase):
    """Test cases for solve_lp against the best vertex of small boxed LPs"""

    def test_random_box_lps(self):
        rng = np.random.default_rng(1234)
        for _ in range(100):
            lp, G, h = random_box_lp(rng)
            best = vertex_optimum(lp.c, G, h)
            result = solve_lp(lp)
            self.assertEqual(result.status, OPTIMAL)
            self.assertAlmostEqual(result.objective, best, delta=1e-6 * max(1.0, abs(best)))
            self.assertTrue(np.all(G @ result.x <= h + 1e-6))


class TestPresolve(unittest.TestCase):
    """Test cases for the bound-tightening presolve"""

    def test_singleton_rows_become_bounds(self):
        A = sp.csr_matrix(np.array([[2.0, 0.0], [1.0, 1.0]]))
        lp = LpData(np.array([1.0, 1.0]), A, np.array(['L', 'L']), np.array([6.0, 10.0]),
                    np.zeros(2), np.full(2, np.inf))
        reduced = presolve(lp)
        self.assertEqual(reduced.status, 'reduced')
        self.assertEqual(list(reduced.rows), [1])
        self.assertEqual(reduced.lp.ub[0], 3.0)

    def test_fixed_columns_are_removed(self):
        A = sp.csr_matrix(np.array([[1.0, 1.0, 1.0]]))
        lp = LpData(np.array([1.0, 2.0, 3.0]), A, np.array(['L']), np.array([10.0]),
                    np.array([0.0, 4.0, 0.0]), np.array([5.0, 4.0, 5.0]))
        reduced = presolve(lp)
        self.assertEqual(list(reduced.columns), [0, 2])
        self.assertEqual(reduced.lp.rhs[0], 6.0)
        self.assertEqual(reduced.offset, 8.0)
        np.testing.assert_array_equal(reduced.postsolve(np.array([1.0, 2.0])), [1.0, 4.0, 2.0])

    def test_integer_bounds_round_inward(self):
        A = sp.csr_matrix(np.array([[2.0]]))
        lp = LpData(np.array([1.0]), A, np.array(['L']), np.array([5.0]), np.zeros(1), np.full(1, np.inf),
                    np.array([True]))
        self.assertEqual(presolve(lp).lp.ub[0], 2.0)

    def test_crossed_bounds(self):
        A = sp.csr_matrix(np.array([[1.0]]))
        lp = LpData(np.array([1.0]), A, np.array(['G']), np.array([5.0]), np.zeros(1), np.ones(1))
        self.assertEqual(presolve(lp).status, INFEASIBLE)


class TestSos2(unittest.TestCase):
    """Test cases for SOS2 feasibility and branching"""

    def test_feasibility(self):
        self.assertTrue(is_sos2_feasible(np.array([0.0, 0.3, 0.7, 0.0]), 1e-9))
        self.assertTrue(is_sos2_feasible(np.array([0.0, 0.0, 1.0]), 1e-9))
        self.assertFalse(is_sos2_feasible(np.array([0.5, 0.0, 0.5]), 1e-9))
        self.assertFalse(is_sos2_feasible(np.array([0.2, 0.3, 0.5]), 1e-9))

    def test_split_point_separates_nonzeros(self):
        self.assertEqual(sos2_split_point(np.array([0.5, 0.0, 0.0, 0.5]), 1e-9), 3)
        self.assertEqual(sos2_split_point(np.array([0.5, 0.0, 0.5]), 1e-9), 2)

    def test_branch_children(self):
        node = BnbNode(0, 0, np.zeros(4), np.ones(4))
        x = np.array([0.5, 0.0, 0.0, 0.5])
        left, right = branch_sos2(node, 0, [0, 1, 2, 3], x, (1, 2))
        self.assertEqual(list(left.ub), [1.0, 1.0, 1.0, 0.0])
        self.assertEqual(list(right.ub), [0.0, 0.0, 1.0, 1.0])
        self.assertEqual(left.sos2_cuts, ((0, 'left', 3),))
        self.assertIsNone(branch_sos2(node, 0, [0, 1, 2, 3], np.array([0.0, 0.4, 0.6, 0.0]), (1, 2)))

    def test_sos2_changes_the_optimum(self):
        """Interpolating across the middle breakpoint is cheaper but not allowed"""
        model = MilpModel('sos2')
        lam = [model.add_variable(f"lam{i}", upper=1.0) for i in range(3)]
        x = model.add_variable('x')
        model.add_constraint('sum', {var_id: 1.0 for var_id in lam}, '=', 1.0)
        model.add_constraint('link', {lam[0]: 0.0, lam[1]: 1.0, lam[2]: 2.0, x: -1.0}, '=', 0.0)
        model.fix(x, 1.0)
        model.add_objective_terms({lam[1]: 5.0})
        model.add_sos2('curve', lam, [0.0, 1.0, 2.0])
        model.freeze()
        self.assertAlmostEqual(solve_relaxation(model).objective, 0.0)
        result = solve_milp(model)
        self.assertEqual(result.status, OPTIMAL)
        self.assertAlmostEqual(result.objective, 5.0, places=6)
        self.assertAlmostEqual(result.x[lam[1]], 1.0, places=6)


class TestBranchAndBound(unittest.TestCase):
    """Test cases for solve_milp against brute-force enumeration"""

    def test_knapsacks_match_enumeration(self):
        rng = np.random.default_rng(11)
        for _ in range(5):
            weights = rng.integers(1, 20, size=8)
            values = rng.integers(1, 30, size=8)
            capacity = int(weights.sum() // 2)
            best = max(int(values @ np.array(choice)) for choice in itertools.product((0, 1), repeat=8)
                       if weights @ np.array(choice) <= capacity)
            result = solve_milp(knapsack(weights, values, capacity))
            self.assertEqual(result.status, OPTIMAL)
            self.assertAlmostEqual(-result.objective, best, places=6)
            self.assertLessEqual(weights @ result.x, capacity + 1e-6)
            np.testing.assert_allclose(result.x, np.round(result.x))

    def test_general_integers(self):
        """min -x - y s.t. 2x + 2y <= 7 has integer optimum -3"""
        model = MilpModel('integers')
        x = model.add_variable('x', VarKind.INTEGER, upper=10)
        y = model.add_variable('y', VarKind.INTEGER, upper=10)
        model.add_constraint('c', {x: 2.0, y: 2.0}, '<=', 7.0)
        model.add_objective_terms({x: -1.0, y: -1.0})
        result = solve_milp(model.freeze())
        self.assertAlmostEqual(result.objective, -3.0)
        self.assertAlmostEqual(result.root_bound, -3.5)
        self.assertAlmostEqual(result.gap, 0.0, places=9)

    def test_threads_give_the_same_optimum(self):
        model = knapsack([5, 4, 3, 7, 6], [10, 7, 5, 12, 9], 13)
        serial = solve_milp(model, threads=1)
        parallel = solve_milp(model, threads=2)
        self.assertEqual(parallel.status, OPTIMAL)
        self.assertAlmostEqual(serial.objective, parallel.objective)
        self.assertEqual(parallel.threads, 2)

    def test_infeasible_milp(self):
        model = MilpModel('parity')
        n = model.add_variable('n', VarKind.INTEGER, upper=10)
        model.add_constraint('half', {n: 2.0}, '=', 3.0)
        self.assertEqual(solve_milp(model.freeze()).status, INFEASIBLE)

    def test_node_limit(self):
        model = knapsack([5, 4, 3], [10, 7, 5], 8)
        result = solve_milp(model, node_limit=1)
        self.assertEqual(result.status, GAP_LIMIT)
        self.assertEqual(result.nodes, 1)

    def test_time_limit(self):
        result = solve_milp(knapsack([5, 4, 3], [10, 7, 5], 8), time_limit=0.0)
        self.assertEqual(result.status, TIME_LIMIT)
        self.assertFalse(result.has_solution)

    def test_options_object(self):
        options = BranchAndBoundOptions(gap=1e-4)
        result = solve_milp(knapsack([5, 4, 3], [10, 7, 5], 8), options)
        self.assertAlmostEqual(result.objective, -15.0)

    def test_unknown_option(self):
        with self.assertRaises(TypeError):
            solve_milp(knapsack([1], [1], 1), warp=True)


class TestMilpEnumeration(unittest.TestCase):
    """Test cases for solve_milp on random binary programs checked by exhaustive enumeration"""

    def test_random_binary_milps(self):
        rng = np.random.default_rng(2718)
        for trial in range(50):
            model, A, senses, rhs, c = random_binary_milp(rng)
            best = enumerate_binary_optimum(A, senses, rhs, c)
            result = solve_milp(model, gap=0.0)
            self.assertEqual(result.status, OPTIMAL, f"trial {trial}")
            self.assertAlmostEqual(result.objective, best, delta=1e-6, msg=f"trial {trial}")
            x = result.x
            np.testing.assert_array_equal(x, np.round(x))
            activity = A @ x
            self.assertTrue(np.all(activity[senses == '<='] <= rhs[senses == '<='] + 1e-6))
            self.assertTrue(np.all(activity[senses == '>='] >= rhs[senses == '>='] - 1e-6))
            np.testing.assert_allclose(activity[senses == '='], rhs[senses == '='], atol=1e-6)

    def test_single_thread_is_deterministic(self):
        model = random_binary_milp(np.random.default_rng(99), n=14, m=20)[0]
        first = solve_milp(model, gap=0.0, threads=1)
        second = solve_milp(model, gap=0.0, threads=1)
        self.assertEqual(first.status, OPTIMAL)
        self.assertEqual(first.nodes, second.nodes)
        self.assertEqual(first.lp_iterations, second.lp_iterations)
        np.testing.assert_array_equal(first.x, second.x)

    def test_fixed_thread_count_is_deterministic(self):
        model = random_binary_milp(np.random.default_rng(99), n=14, m=20)[0]
        first = solve_milp(model, gap=0.0, threads=3)
        second = solve_milp(model, gap=0.0, threads=3)
        self.assertEqual(first.nodes, second.nodes)
        np.testing.assert_array_equal(first.x, second.x)


class TestSolveReport(unittest.TestCase):
    """Test cases for write_report"""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_report_contents(self):
        result = SolveResult(OPTIMAL, objective=12.5, x=np.zeros(2), gap=0.0, nodes=3, wall_time=0.12345)
        path = write_report(result, os.path.join(self.temp_dir, 'nested', 'solve_report.json'),
                            {'variables': 2})
        with open(path) as f:
            report = json.load(f)
        self.assertEqual(report['status'], 'optimal')
        self.assertEqual(report['objective'], 12.5)
        self.assertEqual(report['wall_time_s'], 0.123)
        self.assertEqual(report['model'], {'variables': 2})
        self.assertIn('generated_at', report)

    def test_non_finite_values_become_null(self):
        result = SolveResult(INFEASIBLE, objective=None, gap=float('inf'))
        report = result.to_report()
        self.assertIsNone(report['objective'])
        self.assertIsNone(report['gap'])


if __name__ == '__main__':
    unittest.main()
