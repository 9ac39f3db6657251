"""
LP-based branch and bound with variable and SOS2 branching.

Depth-first until the first incumbent, best-bound afterwards. Every node
re-runs presolve on its local bounds before the simplex.
"""

import heapq
import logging
import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple, Union

import numpy as np
from tqdm import tqdm

import config
from milpcore.model import MilpModel, ModelArrays
from simplexbb.errors import NumericalBreakdown
from simplexbb.lp_solver import ITERATION_LIMIT, LpResult, SimplexOptions, solve_lp
from simplexbb.node import BnbNode
from simplexbb.presolve import LpData, presolve
from simplexbb.result import (
    GAP_LIMIT,
    INFEASIBLE,
    OPTIMAL,
    TIME_LIMIT,
    UNBOUNDED,
    SolveResult,
)
from simplexbb.sos2 import branch_sos2, is_sos2_feasible

logger = logging.getLogger(__name__)

BREAKDOWN = 'breakdown'


@dataclass
class BranchAndBoundOptions:
    gap: float = config.SolverDefaults.GAP
    time_limit: Optional[float] = config.SolverDefaults.TIME_LIMIT
    node_limit: Optional[int] = config.SolverDefaults.NODE_LIMIT
    threads: int = config.SolverDefaults.THREADS
    integrality_tol: float = config.SolverDefaults.INTEGRALITY_TOL
    feasibility_tol: float = config.SolverDefaults.FEASIBILITY_TOL
    simplex: SimplexOptions = field(default_factory=SimplexOptions)
    show_progress: bool = False


@dataclass
class NodeOutcome:
    status: str
    objective: float = math.nan
    x: Optional[np.ndarray] = None
    iterations: int = 0
    message: str = ''


def _as_arrays(model: Union[MilpModel, ModelArrays]) -> ModelArrays:
    return model.to_arrays() if isinstance(model, MilpModel) else model


def solve_relaxation(model: Union[MilpModel, ModelArrays], lb: Optional[np.ndarray] = None,
                     ub: Optional[np.ndarray] = None,
                     options: Optional[SimplexOptions] = None) -> LpResult:
    """
    Solve the LP relaxation (integrality and SOS2 dropped) in model space.

    The returned objective includes the model's objective constant.
    """
    arrays = _as_arrays(model)
    options = options or SimplexOptions()
    lp = LpData(arrays.c, arrays.A, arrays.senses, arrays.rhs,
                arrays.lb if lb is None else lb, arrays.ub if ub is None else ub,
                np.zeros(len(arrays.c), dtype=bool))
    reduced = presolve(lp, feasibility_tol=options.feasibility_tol)
    if reduced.status == INFEASIBLE:
        return LpResult(INFEASIBLE, message=reduced.message)
    result = solve_lp(reduced.lp, options)
    if result.status != OPTIMAL:
        return result
    x = reduced.postsolve(result.x)
    result.x = x
    result.objective = float(arrays.c @ x) + arrays.objective_constant
    return result


class BranchAndBound:
    """
    Search state for one MILP solve.

    With threads > 1 up to `threads` open nodes are popped per round and their
    relaxations solved concurrently; results are then processed in pop order,
    so the search is reproducible for a fixed thread count.
    """

    def __init__(self, model: Union[MilpModel, ModelArrays], options: Optional[BranchAndBoundOptions] = None):
        self.arrays = _as_arrays(model)
        self.options = options or BranchAndBoundOptions()
        self.logger = logging.getLogger(self.__class__.__name__)

        self.integer_ids = np.flatnonzero(self.arrays.integrality)
        self.sos2 = list(self.arrays.sos2)
        self._lock = threading.Lock()
        self._next_id = 0

        self.incumbent_x: Optional[np.ndarray] = None
        self.incumbent_obj = math.inf
        self.root_bound: Optional[float] = None
        self.pruned_bound = math.inf
        self.unresolved_bound = math.inf
        self.nodes_solved = 0
        self.lp_iterations = 0
        self.numerical_issues = 0
        self.unbounded = False

        self._stack: List[BnbNode] = []
        self._heap: List[Tuple[float, int, BnbNode]] = []
        self._best_first = False

    # Open-node queue

    def _new_id(self) -> int:
        node_id = self._next_id
        self._next_id += 1
        return node_id

    def _push(self, node: BnbNode):
        if self._best_first:
            heapq.heappush(self._heap, (node.bound, node.id, node))
        else:
            self._stack.append(node)

    def _pop(self) -> BnbNode:
        if self._best_first:
            return heapq.heappop(self._heap)[2]
        return self._stack.pop()

    def _open_count(self) -> int:
        return len(self._heap) if self._best_first else len(self._stack)

    def _switch_to_best_first(self):
        if self._best_first:
            return
        self._heap = [(node.bound, node.id, node) for node in self._stack]
        heapq.heapify(self._heap)
        self._stack = []
        self._best_first = True

    def _open_bounds(self) -> List[float]:
        if self._best_first:
            return [entry[0] for entry in self._heap]
        return [node.bound for node in self._stack]

    # Node processing

    def _prunable(self, bound: float) -> bool:
        if self.incumbent_x is None:
            return False
        tolerance = self.options.gap * max(1.0, abs(self.incumbent_obj))
        return bound >= self.incumbent_obj - tolerance - 1e-9

    def _solve_node(self, node: BnbNode) -> NodeOutcome:
        arrays = self.arrays
        lp = LpData(arrays.c, arrays.A, arrays.senses, arrays.rhs, node.lb, node.ub, arrays.integrality)
        reduced = presolve(lp, feasibility_tol=self.options.feasibility_tol,
                           integrality_tol=self.options.integrality_tol)
        if reduced.status == INFEASIBLE:
            return NodeOutcome(INFEASIBLE, message=reduced.message)
        try:
            result = solve_lp(reduced.lp, self.options.simplex)
        except NumericalBreakdown as e:
            return NodeOutcome(BREAKDOWN, message=str(e))
        if result.status != OPTIMAL:
            return NodeOutcome(result.status, iterations=result.iterations)
        x = reduced.postsolve(result.x)
        objective = float(arrays.c @ x) + arrays.objective_constant
        return NodeOutcome(OPTIMAL, objective, x, result.iterations)

    def _pick_branch(self, x: np.ndarray) -> Optional[Tuple[str, int]]:
        """Most fractional integer variable (lowest id on ties), else the first violated SOS2 set."""
        if self.integer_ids.size:
            values = x[self.integer_ids]
            fraction = values - np.floor(values)
            distance = np.minimum(fraction, 1.0 - fraction)
            violated = distance > self.options.integrality_tol
            if violated.any():
                scores = np.where(violated, distance, -1.0)
                return 'var', int(self.integer_ids[int(np.argmax(scores))])
        for index, members in enumerate(self.sos2):
            if not is_sos2_feasible(x[members], self.options.integrality_tol):
                return 'sos2', index
        return None

    def _update_incumbent(self, x: np.ndarray, objective: float, node: BnbNode) -> bool:
        with self._lock:
            if objective >= self.incumbent_obj:
                return False
            x = x.copy()
            x[self.integer_ids] = np.round(x[self.integer_ids])
            x = np.clip(x, self.arrays.lb, self.arrays.ub)
            self.incumbent_x = x
            self.incumbent_obj = float(self.arrays.c @ x) + self.arrays.objective_constant
            self.logger.debug(f"Incumbent {self.incumbent_obj:.6g} at node {node.id} (depth {node.depth})")
            return True

    def _branch(self, node: BnbNode, x: np.ndarray, kind: str, index: int):
        if kind == 'var':
            value = x[index]
            down_ub = node.ub.copy()
            down_ub[index] = math.floor(value)
            up_lb = node.lb.copy()
            up_lb[index] = math.ceil(value)
            down = node.child(self._new_id(), node.bound, f"x{index} <= {math.floor(value)}", ub=down_ub)
            up = node.child(self._new_id(), node.bound, f"x{index} >= {math.ceil(value)}", lb=up_lb)
            first, second = down, up
        else:
            ids = (self._new_id(), self._new_id())
            first, second = branch_sos2(node, index, self.sos2[index], x, ids, self.options.integrality_tol)
        # Stack order: the first child is explored first
        self._push(second)
        self._push(first)

    def _process(self, node: BnbNode, outcome: NodeOutcome):
        self.nodes_solved += 1
        self.lp_iterations += outcome.iterations
        status = outcome.status

        if status in (BREAKDOWN, ITERATION_LIMIT):
            self.numerical_issues += 1
            self.unresolved_bound = min(self.unresolved_bound, node.bound)
            self.logger.warning(f"Node {node.id} dropped ({status}): {outcome.message}")
            return
        if status == INFEASIBLE:
            return
        if status == UNBOUNDED:
            self.unbounded = True
            return

        if node.id == 0:
            self.root_bound = outcome.objective
        node.bound = max(node.bound, outcome.objective)
        if self._prunable(node.bound):
            self.pruned_bound = min(self.pruned_bound, node.bound)
            return

        branch = self._pick_branch(outcome.x)
        if branch is None:
            if self._update_incumbent(outcome.x, outcome.objective, node):
                self._switch_to_best_first()
            return
        self._branch(node, outcome.x, *branch)

    def solve(self) -> SolveResult:
        arrays = self.arrays
        options = self.options
        threads = max(1, int(options.threads or 1))
        start = time.monotonic()

        lb = arrays.lb.astype(float).copy()
        ub = arrays.ub.astype(float).copy()
        lb[self.integer_ids] = np.ceil(lb[self.integer_ids] - options.integrality_tol)
        ub[self.integer_ids] = np.floor(ub[self.integer_ids] + options.integrality_tol)
        self._push(BnbNode(self._new_id(), 0, lb, ub))

        self.logger.info(f"Branch and bound: {len(arrays.c)} variables, {arrays.A.shape[0]} rows, "
                         f"{len(self.integer_ids)} integer, {len(self.sos2)} SOS2 sets, {threads} thread(s)")
        status = None
        executor = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
        progress = tqdm(desc='B&B', unit='node', disable=not options.show_progress, leave=False)
        try:
            while self._open_count() and not self.unbounded:
                if options.time_limit is not None and time.monotonic() - start >= options.time_limit:
                    status = TIME_LIMIT
                    break
                if options.node_limit is not None and self.nodes_solved >= options.node_limit:
                    status = GAP_LIMIT
                    break

                batch = []
                while self._open_count() and len(batch) < threads:
                    node = self._pop()
                    if self._prunable(node.bound):
                        self.pruned_bound = min(self.pruned_bound, node.bound)
                        continue
                    batch.append(node)
                if not batch:
                    continue

                if executor is not None:
                    outcomes = list(executor.map(self._solve_node, batch))
                else:
                    outcomes = [self._solve_node(node) for node in batch]
                for node, outcome in zip(batch, outcomes):
                    self._process(node, outcome)
                progress.update(len(batch))
                if self.incumbent_x is not None:
                    progress.set_postfix(incumbent=f"{self.incumbent_obj:.6g}", open=self._open_count())
        finally:
            progress.close()
            if executor is not None:
                executor.shutdown(wait=True)

        return self._result(status, time.monotonic() - start, threads)

    def _result(self, status: Optional[str], wall_time: float, threads: int) -> SolveResult:
        if self.unbounded and self.incumbent_x is None:
            status = UNBOUNDED
        candidates = self._open_bounds() + [self.pruned_bound, self.unresolved_bound]
        best_bound = min(candidates) if candidates else math.inf
        gap = None
        if self.incumbent_x is not None:
            best_bound = min(best_bound, self.incumbent_obj)
            gap = max(0.0, (self.incumbent_obj - best_bound) / max(1.0, abs(self.incumbent_obj)))
        if status is None:
            if self.incumbent_x is None:
                status = INFEASIBLE if not self.numerical_issues else GAP_LIMIT
            elif self.numerical_issues and gap > self.options.gap:
                status = GAP_LIMIT
            else:
                status = OPTIMAL

        message = f"{self.nodes_solved} nodes, {self.lp_iterations} LP iterations"
        if self.numerical_issues:
            message += f", {self.numerical_issues} node(s) dropped on numerical trouble"
        result = SolveResult(
            status=status,
            objective=self.incumbent_obj if self.incumbent_x is not None else None,
            x=self.incumbent_x,
            gap=gap,
            best_bound=best_bound if math.isfinite(best_bound) else None,
            root_bound=self.root_bound,
            nodes=self.nodes_solved,
            lp_iterations=self.lp_iterations,
            wall_time=wall_time,
            threads=threads,
            numerical_issues=self.numerical_issues,
            message=message,
        )
        self.logger.info(f"Branch and bound finished: {status}, objective {result.objective}, {message}, "
                         f"{wall_time:.1f}s")
        return result


def solve_milp(model: Union[MilpModel, ModelArrays], options: Optional[BranchAndBoundOptions] = None,
               **overrides) -> SolveResult:
    """
    Solve a MILP to the relative gap in `options`.

    Args:
        model: Frozen MilpModel or its arrays
        options: Search options; keyword overrides (gap, time_limit, node_limit,
            threads, show_progress) are applied on top

    Returns:
        SolveResult: Status is optimal, infeasible, unbounded, gap_limit or time_limit
    """
    options = options or BranchAndBoundOptions()
    unknown = [key for key in overrides if not hasattr(options, key)]
    if unknown:
        raise TypeError(f"Unknown solver option(s): {unknown}")
    options = replace(options, **{key: value for key, value in overrides.items() if value is not None})
    return BranchAndBound(model, options).solve()
