"""
Solver failures. Infeasible, unbounded and limit outcomes are statuses, not exceptions.
"""


class SolverError(RuntimeError):
    """Base class for solver failures."""


class NumericalBreakdown(SolverError):
    """Singular basis, non-finite iterate or a vanishing pivot."""
