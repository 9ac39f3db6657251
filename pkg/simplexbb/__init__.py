"""
In-house MILP solver: presolve, bounded revised simplex and branch and bound with SOS2 branching.
"""

from simplexbb.branch_and_bound import BranchAndBound, BranchAndBoundOptions, solve_milp, solve_relaxation
from simplexbb.errors import NumericalBreakdown, SolverError
from simplexbb.lp_solver import LpResult, RevisedSimplex, SimplexOptions, equilibrate, solve_lp
from simplexbb.node import BnbNode
from simplexbb.presolve import LpData, PresolveResult, presolve
from simplexbb.result import (
    GAP_LIMIT,
    INFEASIBLE,
    OPTIMAL,
    STATUSES,
    TIME_LIMIT,
    UNBOUNDED,
    SolveResult,
    write_report,
)
from simplexbb.sos2 import branch_sos2, is_sos2_feasible, sos2_split_point
