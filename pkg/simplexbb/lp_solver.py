"""
Bounded-variable revised simplex.

Rows are turned into equalities with one slack per row (L: s >= 0, G: s <= 0,
E: s = 0). Phase 1 minimizes the sum of artificials added to the rows whose
slack cannot absorb the initial residual; phase 2 fixes the artificials at zero
and minimizes the real objective from the phase 1 basis.

The problem is equilibrated with power-of-two row and column factors before
the solve. The basis inverse is a sparse LU (scipy.sparse.linalg.splu)
followed by a product-form eta file, rebuilt every `refactor_period` pivots
or earlier when a pivot looks unstable. The ratio test is Harris' two-pass
rule: bounds are relaxed by the feasibility tolerance to find the step limit,
then the largest pivot within that limit leaves.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

import config
from simplexbb.errors import NumericalBreakdown
from simplexbb.presolve import LpData

logger = logging.getLogger(__name__)

OPTIMAL = 'optimal'
INFEASIBLE = 'infeasible'
UNBOUNDED = 'unbounded'
ITERATION_LIMIT = 'iteration_limit'


@dataclass
class SimplexOptions:
    feasibility_tol: float = config.SolverDefaults.FEASIBILITY_TOL
    optimality_tol: float = config.SolverDefaults.OPTIMALITY_TOL
    pivot_tol: float = config.SolverDefaults.PIVOT_TOL
    relative_pivot_tol: float = config.SolverDefaults.RELATIVE_PIVOT_TOL
    refactor_period: int = config.SolverDefaults.REFACTOR_PERIOD
    scaling_passes: int = config.SolverDefaults.SCALING_PASSES
    max_restarts: int = config.SolverDefaults.MAX_RESTARTS
    degenerate_stall: int = config.SolverDefaults.DEGENERATE_STALL
    iteration_limit: int = config.SolverDefaults.ITERATION_LIMIT
    bland: bool = False


@dataclass
class LpResult:
    status: str
    objective: float = math.nan
    x: Optional[np.ndarray] = None
    iterations: int = 0
    phase1_iterations: int = 0
    used_bland: bool = False
    restarts: int = 0
    message: str = ''

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL


def _row_extremes(matrix: sp.csr_matrix) -> Tuple[np.ndarray, np.ndarray]:
    """Smallest and largest nonzero magnitude per row (1.0 for empty rows)."""
    rows = matrix.shape[0]
    low = np.ones(rows)
    high = np.ones(rows)
    filled = np.flatnonzero(np.diff(matrix.indptr))
    if filled.size:
        starts = matrix.indptr[filled]
        data = np.abs(matrix.data)
        low[filled] = np.minimum.reduceat(data, starts)
        high[filled] = np.maximum.reduceat(data, starts)
    return low, high


def equilibrate(lp: LpData, passes: int = config.SolverDefaults.SCALING_PASSES
                ) -> Tuple[LpData, np.ndarray, np.ndarray]:
    """
    Geometric-mean row and column scaling rounded to powers of two.

    The scaled problem is R·A·C with x = C·x_scaled, so bounds divide by C,
    costs multiply by C and right-hand sides multiply by R.

    Returns:
        tuple: (scaled LpData, row factors R, column factors C)
    """
    A = sp.csr_matrix(lp.A, dtype=float, copy=True)
    A.eliminate_zeros()
    m, n = A.shape
    row = np.ones(m)
    col = np.ones(n)
    if passes <= 0 or A.nnz == 0:
        return lp, row, col

    for _ in range(passes):
        low, high = _row_extremes(sp.csr_matrix(sp.diags(row) @ A @ sp.diags(col)))
        row /= np.sqrt(low * high)
        low, high = _row_extremes(sp.csr_matrix((sp.diags(row) @ A @ sp.diags(col)).T))
        col /= np.sqrt(low * high)
    row = np.exp2(np.round(np.log2(row)))
    col = np.exp2(np.round(np.log2(col)))

    scaled = LpData(
        c=lp.c * col,
        A=sp.csr_matrix(sp.diags(row) @ A @ sp.diags(col)),
        senses=lp.senses,
        rhs=lp.rhs * row,
        lb=lp.lb / col,
        ub=lp.ub / col,
        integrality=lp.integrality,
    )
    return scaled, row, col


class BasisFactor:
    """LU of the basis matrix plus an eta file of later column replacements."""

    def __init__(self, matrix: sp.csc_matrix, basis: np.ndarray):
        size = len(basis)
        if size == 0:
            self._lu = None
        else:
            try:
                self._lu = splu(sp.csc_matrix(matrix[:, basis]))
            except RuntimeError as e:
                raise NumericalBreakdown(f"Basis factorization failed: {e}") from e
        self.size = size
        self.etas: List[Tuple[int, np.ndarray]] = []

    def ftran(self, rhs: np.ndarray) -> np.ndarray:
        """Solve B v = rhs."""
        if self.size == 0:
            return np.zeros(0)
        v = self._lu.solve(rhs)
        for r, w in self.etas:
            pivot = v[r] / w[r]
            v -= pivot * w
            v[r] = pivot
        return v

    def btran(self, rhs: np.ndarray) -> np.ndarray:
        """Solve Bᵀ y = rhs."""
        if self.size == 0:
            return np.zeros(0)
        z = rhs.astype(float).copy()
        for r, w in reversed(self.etas):
            others = z @ w - z[r] * w[r]
            z[r] = (z[r] - others) / w[r]
        return self._lu.solve(z, trans='T')

    def update(self, r: int, w: np.ndarray):
        self.etas.append((r, w.copy()))


class RevisedSimplex:
    """
    Two-phase revised simplex on min c·x, A x (senses) rhs, lb <= x <= ub.

    Dantzig pricing by default; switches to Bland's rule for the rest of the
    solve once `degenerate_stall` consecutive degenerate pivots occur. A
    numerical breakdown restarts both phases from the last point that passed a
    refactorization, at most `max_restarts` times.
    """

    def __init__(self, lp: LpData, options: Optional[SimplexOptions] = None):
        self.original = lp
        self.options = options or SimplexOptions()
        self.lp, self.row_scale, self.col_scale = equilibrate(lp, self.options.scaling_passes)
        self.logger = logging.getLogger(self.__class__.__name__)
        self.iterations = 0
        self.restarts = 0
        self.used_bland = self.options.bland
        self._checkpoint: Optional[np.ndarray] = None

    def _setup(self, start: Optional[np.ndarray] = None):
        lp = self.lp
        m, n = lp.A.shape
        self.m, self.n = m, n

        slack_lb = np.where(lp.senses == 'G', -np.inf, 0.0)
        slack_ub = np.where(lp.senses == 'L', np.inf, 0.0)

        x = np.zeros(n + m)
        if start is None:
            x_struct = np.where(np.isfinite(lp.lb), lp.lb, np.where(np.isfinite(lp.ub), lp.ub, 0.0))
        else:
            x_struct = np.clip(start, lp.lb, lp.ub)
        x[:n] = x_struct
        residual = lp.rhs - lp.A @ x_struct

        slack_value = np.clip(residual, slack_lb, slack_ub)
        gap = residual - slack_value
        needs_artificial = np.abs(gap) > self.options.feasibility_tol
        art_rows = np.flatnonzero(needs_artificial)
        art_signs = np.sign(gap[art_rows])
        k = len(art_rows)
        x[n:n + m] = np.where(needs_artificial, slack_value, residual)

        art_cols = sp.csc_matrix((art_signs, (art_rows, np.arange(k))), shape=(m, k))
        self.matrix = sp.hstack([sp.csc_matrix(lp.A), sp.identity(m, format='csc'), art_cols], format='csc')
        self.lower = np.concatenate([lp.lb, slack_lb, np.zeros(k)])
        self.upper = np.concatenate([lp.ub, slack_ub, np.full(k, np.inf)])
        self.x = np.concatenate([x, np.abs(gap[art_rows])])
        self.n_art = k

        basis = np.arange(n, n + m)
        basis[art_rows] = n + m + np.arange(k)
        self.basis = basis
        self.is_basic = np.zeros(n + m + k, dtype=bool)
        self.is_basic[basis] = True

        self.cost_phase2 = np.concatenate([lp.c, np.zeros(m + k)])
        self.cost_phase1 = np.concatenate([np.zeros(n + m), np.ones(k)])
        self.factor = BasisFactor(self.matrix, self.basis)
        self._checkpoint = x_struct.copy()

    def _column(self, j: int) -> np.ndarray:
        col = np.zeros(self.m)
        start, end = self.matrix.indptr[j], self.matrix.indptr[j + 1]
        col[self.matrix.indices[start:end]] = self.matrix.data[start:end]
        return col

    def _entering(self, j: int) -> np.ndarray:
        w = self.factor.ftran(self._column(j))
        if not np.all(np.isfinite(w)):
            raise NumericalBreakdown(f"Non-finite entering column {j}")
        return w

    def _refactor(self):
        self.factor = BasisFactor(self.matrix, self.basis)
        nonbasic_x = np.where(self.is_basic, 0.0, self.x)
        residual = self.lp.rhs - self.matrix @ nonbasic_x
        self.x[self.basis] = self.factor.ftran(residual)
        if not np.all(np.isfinite(self.x)):
            raise NumericalBreakdown("Non-finite basic solution after refactorization")
        self._checkpoint = self.x[:self.n].copy()

    def _price(self, cost: np.ndarray, bland: bool, rejected: np.ndarray) -> Tuple[int, float]:
        y = self.factor.btran(cost[self.basis])
        reduced = cost - self.matrix.T @ y
        tol = self.options.optimality_tol
        movable = ~self.is_basic & (self.upper > self.lower) & ~rejected
        can_increase = movable & (self.x < self.upper) & (reduced < -tol)
        can_decrease = movable & (self.x > self.lower) & (reduced > tol)
        eligible = np.flatnonzero(can_increase | can_decrease)
        if eligible.size == 0:
            return -1, 0.0
        if bland:
            j = int(eligible[0])
        else:
            j = int(eligible[np.argmax(np.abs(reduced[eligible]))])
        return j, (1.0 if reduced[j] < 0 else -1.0)

    def _ratio_test(self, w: np.ndarray, direction: float, bland: bool) -> Tuple[float, int, bool]:
        """Step length, leaving row (-1 when no basic variable blocks) and whether the leaver goes to its lower bound."""
        delta = direction * w
        x_b = self.x[self.basis]
        lo = self.lower[self.basis]
        hi = self.upper[self.basis]
        tol = self.options.feasibility_tol

        dec = (delta > self.options.pivot_tol) & np.isfinite(lo)
        inc = (delta < -self.options.pivot_tol) & np.isfinite(hi)
        if not (dec.any() or inc.any()):
            return math.inf, -1, False

        relaxed = np.full(self.m, np.inf)
        relaxed[dec] = (x_b[dec] - lo[dec] + tol) / delta[dec]
        relaxed[inc] = (hi[inc] + tol - x_b[inc]) / -delta[inc]
        limit = float(relaxed.min())

        exact = np.full(self.m, np.inf)
        exact[dec] = (x_b[dec] - lo[dec]) / delta[dec]
        exact[inc] = (hi[inc] - x_b[inc]) / -delta[inc]
        ties = np.flatnonzero(exact <= limit)
        if bland:
            row = int(ties[np.argmin(self.basis[ties])])
        else:
            row = int(ties[np.argmax(np.abs(delta[ties]))])
        return max(0.0, float(exact[row])), row, bool(delta[row] > 0)

    def _unstable(self, w: np.ndarray, row: int) -> bool:
        threshold = max(self.options.pivot_tol, self.options.relative_pivot_tol * float(np.max(np.abs(w))))
        return abs(w[row]) < threshold

    def _iterate(self, cost: np.ndarray, phase: int) -> str:
        degenerate_run = 0
        bland = self.used_bland
        rejected = np.zeros(len(self.x), dtype=bool)
        while True:
            if self.iterations >= self.options.iteration_limit:
                return ITERATION_LIMIT
            j, direction = self._price(cost, bland, rejected)
            if j < 0:
                if rejected.any():
                    raise NumericalBreakdown(f"Phase {phase}: only unstable pivots remain")
                return OPTIMAL

            w = self._entering(j)
            step, row, to_lower = self._ratio_test(w, direction, bland)
            if row >= 0 and self._unstable(w, row):
                if self.factor.etas:
                    self._refactor()
                    w = self._entering(j)
                    step, row, to_lower = self._ratio_test(w, direction, bland)
                if row >= 0 and self._unstable(w, row):
                    self.logger.debug(f"Phase {phase}: column {j} rejected, pivot {w[row]:.3e}")
                    rejected[j] = True
                    continue

            room = self.upper[j] - self.x[j] if direction > 0 else self.x[j] - self.lower[j]
            if math.isfinite(room) and room <= step:
                step = max(0.0, room)
                row = -1
            elif not math.isfinite(step):
                return UNBOUNDED

            self.x[self.basis] -= step * direction * w
            self.x[j] += step * direction
            self.iterations += 1
            rejected[:] = False

            if row >= 0:
                leaving = self.basis[row]
                self.x[leaving] = self.lower[leaving] if to_lower else self.upper[leaving]
                self.is_basic[leaving] = False
                self.is_basic[j] = True
                self.basis[row] = j
                self.factor.update(row, w)
                if len(self.factor.etas) >= self.options.refactor_period:
                    self._refactor()
            elif direction > 0:
                self.x[j] = self.upper[j]
            else:
                self.x[j] = self.lower[j]

            if step <= self.options.feasibility_tol:
                degenerate_run += 1
                if not bland and degenerate_run >= self.options.degenerate_stall:
                    self.logger.debug(f"Phase {phase}: {degenerate_run} degenerate pivots, switching to Bland's rule")
                    bland = True
                    self.used_bland = True
            else:
                degenerate_run = 0

    def solve(self) -> LpResult:
        """Run both phases and return the structural solution in unscaled space."""
        if self.lp.A.shape[0] == 0:
            return self._solve_unconstrained()
        start = None
        while True:
            try:
                return self._run(start)
            except NumericalBreakdown as e:
                if self.restarts >= self.options.max_restarts or self._checkpoint is None:
                    raise
                self.restarts += 1
                start = self._checkpoint
                self.logger.debug(f"Restart {self.restarts} from the last refactorized point ({e})")

    def _run(self, start: Optional[np.ndarray]) -> LpResult:
        lp = self.lp
        m, n = lp.A.shape
        self._setup(start)
        phase1_iterations = 0
        if self.n_art:
            status = self._iterate(self.cost_phase1, phase=1)
            phase1_iterations = self.iterations
            if status == UNBOUNDED:
                raise NumericalBreakdown("Phase 1 objective reported unbounded")
            if status == ITERATION_LIMIT:
                return self._stopped(ITERATION_LIMIT, phase1_iterations)
            self._refactor()
            infeasibility = float(self.x[n + m:].sum())
            scale = 1.0 + float(np.max(np.abs(lp.rhs), initial=0.0))
            if infeasibility > self.options.feasibility_tol * scale:
                self.logger.debug(f"Phase 1 ended with infeasibility {infeasibility:.3e}")
                return self._stopped(INFEASIBLE, phase1_iterations)
            self.upper[n + m:] = 0.0
            self.x[n + m:] = 0.0

        status = self._iterate(self.cost_phase2, phase=2)
        if status != OPTIMAL:
            return self._stopped(status, phase1_iterations)
        self._refactor()
        x = np.clip(self.x[:n] * self.col_scale, self.original.lb, self.original.ub)
        return LpResult(OPTIMAL, float(self.original.c @ x), x, self.iterations, phase1_iterations,
                        self.used_bland, self.restarts)

    def _stopped(self, status: str, phase1_iterations: int) -> LpResult:
        return LpResult(status, iterations=self.iterations, phase1_iterations=phase1_iterations,
                        used_bland=self.used_bland, restarts=self.restarts)

    def _solve_unconstrained(self) -> LpResult:
        lp = self.original
        x = np.zeros(len(lp.c))
        for j, cost in enumerate(lp.c):
            if cost > 0:
                x[j] = lp.lb[j]
            elif cost < 0:
                x[j] = lp.ub[j]
            else:
                x[j] = lp.lb[j] if np.isfinite(lp.lb[j]) else (lp.ub[j] if np.isfinite(lp.ub[j]) else 0.0)
            if not np.isfinite(x[j]):
                return LpResult(UNBOUNDED)
        return LpResult(OPTIMAL, float(lp.c @ x), x)


def solve_lp(lp: LpData, options: Optional[SimplexOptions] = None) -> LpResult:
    """
    Solve an LP relaxation, retrying once with Bland's rule after a numerical breakdown.

    Raises:
        NumericalBreakdown: If the retry breaks down as well
    """
    options = options or SimplexOptions()
    try:
        return RevisedSimplex(lp, options).solve()
    except NumericalBreakdown as e:
        if options.bland:
            raise
        logger.warning(f"Simplex breakdown ({e}); retrying with Bland's rule")
        retry = replace(options, bland=True)
        return RevisedSimplex(lp, retry).solve()
