"""
Bound-tightening presolve: fixed-column removal and singleton rows.

Runs at the root and at every branch-and-bound node. Integer columns get their
tightened bounds rounded inward.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

import config

logger = logging.getLogger(__name__)

FIXED_TOL = 1e-12


@dataclass
class LpData:
    """min c·x s.t. A x (senses) rhs, lb <= x <= ub."""

    c: np.ndarray
    A: sp.csr_matrix
    senses: np.ndarray
    rhs: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    integrality: Optional[np.ndarray] = None

    @property
    def shape(self):
        return self.A.shape


@dataclass
class PresolveResult:
    status: str                 # 'reduced' or 'infeasible'
    lp: Optional[LpData] = None
    columns: Optional[np.ndarray] = None
    rows: Optional[np.ndarray] = None
    fixed_values: Optional[np.ndarray] = None
    offset: float = 0.0
    message: str = ''

    def postsolve(self, x_reduced: np.ndarray) -> np.ndarray:
        """Expand a reduced solution to the original column space."""
        x = self.fixed_values.copy()
        x[self.columns] = x_reduced
        return x


def _row_activity_feasible(sense: str, rhs: float, tol: float) -> bool:
    if sense == 'L':
        return 0.0 <= rhs + tol
    if sense == 'G':
        return 0.0 >= rhs - tol
    return abs(rhs) <= tol


def presolve(lp: LpData, feasibility_tol: float = config.SolverDefaults.FEASIBILITY_TOL,
             integrality_tol: float = config.SolverDefaults.INTEGRALITY_TOL,
             max_passes: int = config.SolverDefaults.PRESOLVE_PASSES) -> PresolveResult:
    """
    Remove fixed columns and turn singleton rows into bounds until nothing changes.

    Args:
        lp: Problem data (not modified)
        feasibility_tol: Slack allowed on empty rows and crossed bounds
        integrality_tol: Slack used when rounding integer bounds
        max_passes: Upper limit on reduction passes

    Returns:
        PresolveResult: The reduced problem with its postsolve map, or status 'infeasible'
    """
    A = sp.csr_matrix(lp.A)
    m, n = A.shape
    lb = lp.lb.astype(float).copy()
    ub = lp.ub.astype(float).copy()
    integrality = lp.integrality if lp.integrality is not None else np.zeros(n, dtype=bool)
    rhs = lp.rhs.astype(float).copy()
    pattern = A.copy()
    pattern.data = np.ones_like(pattern.data)

    if integrality.any():
        lb[integrality] = np.ceil(lb[integrality] - integrality_tol)
        ub[integrality] = np.floor(ub[integrality] + integrality_tol)
    if np.any(lb > ub + feasibility_tol):
        return PresolveResult('infeasible', message='crossed bounds')

    col_active = np.ones(n, dtype=bool)
    row_active = np.ones(m, dtype=bool)
    fixed_values = np.zeros(n)
    offset = 0.0

    for _ in range(max_passes):
        changed = False

        fixed = col_active & np.isfinite(lb) & (ub - lb <= FIXED_TOL)
        if fixed.any():
            values = np.where(fixed, lb, 0.0)
            fixed_values[fixed] = lb[fixed]
            rhs -= A @ values
            offset += float(lp.c[fixed] @ lb[fixed])
            col_active[fixed] = False
            changed = True

        counts = pattern @ col_active.astype(float)
        empty = np.flatnonzero(row_active & (counts == 0))
        for i in empty:
            if not _row_activity_feasible(lp.senses[i], rhs[i], feasibility_tol):
                return PresolveResult('infeasible', message=f'empty row {i} violated')
            row_active[i] = False
            changed = True

        singletons = np.flatnonzero(row_active & (counts == 1))
        for i in singletons:
            start, end = A.indptr[i], A.indptr[i + 1]
            cols = A.indices[start:end]
            keep = col_active[cols]
            j = int(cols[keep][0])
            a = float(A.data[start:end][keep][0])
            bound = rhs[i] / a
            sense = lp.senses[i]
            if sense == 'E':
                lower, upper = bound, bound
            elif (sense == 'L') == (a > 0):
                lower, upper = -math.inf, bound
            else:
                lower, upper = bound, math.inf
            if integrality[j]:
                lower = math.ceil(lower - integrality_tol) if math.isfinite(lower) else lower
                upper = math.floor(upper + integrality_tol) if math.isfinite(upper) else upper
            lb[j] = max(lb[j], lower)
            ub[j] = min(ub[j], upper)
            if lb[j] > ub[j]:
                if lb[j] - ub[j] > feasibility_tol * max(1.0, abs(lb[j])):
                    return PresolveResult('infeasible', message=f'row {i} crosses bounds of column {j}')
                ub[j] = lb[j]
            row_active[i] = False
            changed = True

        if not changed:
            break

    columns = np.flatnonzero(col_active)
    rows = np.flatnonzero(row_active)
    reduced = LpData(
        c=lp.c[columns],
        A=A[rows][:, columns].tocsr(),
        senses=lp.senses[rows],
        rhs=rhs[rows],
        lb=lb[columns],
        ub=ub[columns],
        integrality=integrality[columns],
    )
    logger.debug(f"Presolve: {m}x{n} -> {len(rows)}x{len(columns)}, offset {offset:.6g}")
    return PresolveResult('reduced', reduced, columns, rows, fixed_values, offset)
