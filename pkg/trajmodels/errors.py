"""
Exceptions raised by the trajectory surrogate models and the fit-table loader.
"""


class TrajectoryModelError(ValueError):
    """Base class for trajectory model errors."""


class DomainError(TrajectoryModelError):
    """Input outside the mathematical domain of a model (e.g. Isp <= 0)."""


class BadBreakpoints(TrajectoryModelError):
    """PWL breakpoints that are not strictly increasing or fewer than two."""


class SchemaError(TrajectoryModelError):
    """A data table is missing columns or holds values outside their envelope."""


class MissingRow(TrajectoryModelError):
    """A data table lacks a row the registry requires."""

    def __init__(self, table, key):
        self.table = table
        self.key = key
        super().__init__(f"Table '{table}' has no row for {key}")
