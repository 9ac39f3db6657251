"""
Branch-and-bound search node.
"""

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np


@dataclass
class BnbNode:
    """
    A subproblem: the root bounds tightened by every branching decision on the path.

    Attributes:
        id: Creation order, used for deterministic tie-breaking
        depth: Distance from the root
        lb, ub: Local variable bounds (full model space)
        bound: LP objective of the parent (-inf at the root)
        parent: Parent node id
        branch: Human-readable branching decision that created the node
    """

    id: int
    depth: int
    lb: np.ndarray
    ub: np.ndarray
    bound: float = -np.inf
    parent: Optional[int] = None
    branch: str = 'root'
    sos2_cuts: Tuple[Tuple[int, str, int], ...] = field(default_factory=tuple)

    def child(self, node_id: int, bound: float, branch: str, lb: Optional[np.ndarray] = None,
              ub: Optional[np.ndarray] = None, sos2_cut: Optional[Tuple[int, str, int]] = None) -> 'BnbNode':
        cuts = self.sos2_cuts + ((sos2_cut,) if sos2_cut else ())
        return BnbNode(
            id=node_id,
            depth=self.depth + 1,
            lb=self.lb if lb is None else lb,
            ub=self.ub if ub is None else ub,
            bound=bound,
            parent=self.id,
            branch=branch,
            sos2_cuts=cuts,
        )

    def sort_key(self):
        return (self.bound, self.id)
