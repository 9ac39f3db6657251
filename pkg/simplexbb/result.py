"""
Solve outcome and its JSON report.
"""

import json
import math
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

OPTIMAL = 'optimal'
INFEASIBLE = 'infeasible'
UNBOUNDED = 'unbounded'
GAP_LIMIT = 'gap_limit'
TIME_LIMIT = 'time_limit'

STATUSES = (OPTIMAL, INFEASIBLE, UNBOUNDED, GAP_LIMIT, TIME_LIMIT)


def _finite_or_none(value: Optional[float]) -> Optional[float]:
    if value is None or not math.isfinite(value):
        return None
    return float(value)


@dataclass
class SolveResult:
    """
    Attributes:
        status: One of STATUSES
        objective: Incumbent objective (None when there is no incumbent)
        x: Incumbent in model variable order
        gap: (objective - best_bound) / max(1, |objective|)
        best_bound: Smallest bound over open and gap-pruned nodes
        root_bound: Root LP relaxation objective
        nodes: Nodes whose relaxation was solved
        lp_iterations: Simplex pivots over all nodes
        wall_time: Seconds
        numerical_issues: Nodes dropped after a repeated numerical breakdown
    """

    status: str
    objective: Optional[float] = None
    x: Optional[np.ndarray] = None
    gap: Optional[float] = None
    best_bound: Optional[float] = None
    root_bound: Optional[float] = None
    nodes: int = 0
    lp_iterations: int = 0
    wall_time: float = 0.0
    threads: int = 1
    numerical_issues: int = 0
    message: str = ''
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def has_solution(self) -> bool:
        return self.x is not None

    def to_report(self, model_statistics: Optional[Dict[str, int]] = None) -> Dict[str, Any]:
        report = {
            'status': self.status,
            'objective': _finite_or_none(self.objective),
            'gap': _finite_or_none(self.gap),
            'best_bound': _finite_or_none(self.best_bound),
            'root_bound': _finite_or_none(self.root_bound),
            'nodes': self.nodes,
            'lp_iterations': self.lp_iterations,
            'wall_time_s': round(self.wall_time, 3),
            'threads': self.threads,
            'numerical_issues': self.numerical_issues,
            'message': self.message,
            'generated_at': datetime.now().isoformat(timespec='seconds'),
        }
        if model_statistics:
            report['model'] = dict(model_statistics)
        report.update(self.extra)
        return report


def write_report(result: SolveResult, path: Union[str, Path],
                 model_statistics: Optional[Dict[str, int]] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w') as f:
        json.dump(result.to_report(model_statistics), f, indent=2)
    return path
