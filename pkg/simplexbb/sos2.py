"""
SOS2 branching: split a violated λ-set into a left and a right window.
"""

import math
from typing import Optional, Sequence, Tuple

import numpy as np

from simplexbb.node import BnbNode


def nonzero_positions(values: np.ndarray, tol: float) -> np.ndarray:
    return np.flatnonzero(np.abs(values) > tol)


def is_sos2_feasible(values: np.ndarray, tol: float) -> bool:
    """At most two nonzero members, and if two then adjacent."""
    nonzero = nonzero_positions(values, tol)
    return len(nonzero) <= 1 or (len(nonzero) == 2 and nonzero[1] - nonzero[0] == 1)


def sos2_split_point(values: np.ndarray, tol: float) -> int:
    """
    1-based split index r for a violated set of N members.

    r = ceil(Σ k·λ_k / Σ λ_k), clamped to [2, N-1] and to the open span of the
    nonzero members so that both children cut off the current point.
    """
    weights = np.clip(values, 0.0, None)
    count = len(values)
    k = np.arange(1, count + 1)
    total = float(weights.sum())
    centre = float(k @ weights) / total if total > tol else (count + 1) / 2.0
    r = int(math.ceil(centre - 1e-12))
    r = min(max(r, 2), count - 1)
    nonzero = nonzero_positions(values, tol) + 1
    if len(nonzero):
        r = min(max(r, int(nonzero[0]) + 1), int(nonzero[-1]) - 1)
    return r


def branch_sos2(node: BnbNode, set_index: int, members: Sequence[int], x: np.ndarray,
                next_ids: Tuple[int, int], tol: float = 1e-9) -> Optional[Tuple[BnbNode, BnbNode]]:
    """
    Two children of `node` for a violated SOS2 set, or None when the set is satisfied.

    Left child forces λ_{r+1..N} = 0; right child forces λ_{1..r-1} = 0.

    Args:
        node: Parent node
        set_index: Position of the set in the model's SOS2 list
        members: Variable ids λ_1..λ_N in order
        x: Relaxation solution in model space
        next_ids: Ids for the left and right children
        tol: Magnitude below which a member counts as zero

    Returns:
        Optional[Tuple[BnbNode, BnbNode]]: (left, right)
    """
    members = np.asarray(members, dtype=int)
    values = x[members]
    if is_sos2_feasible(values, tol):
        return None
    r = sos2_split_point(values, tol)

    left_ub = node.ub.copy()
    left_ub[members[r:]] = 0.0
    right_ub = node.ub.copy()
    right_ub[members[:r - 1]] = 0.0

    bound = float(node.bound)
    left = node.child(next_ids[0], bound, f"sos2[{set_index}] <= {r}", ub=left_ub,
                      sos2_cut=(set_index, 'left', r))
    right = node.child(next_ids[1], bound, f"sos2[{set_index}] >= {r}", ub=right_ub,
                       sos2_cut=(set_index, 'right', r))
    return left, right
