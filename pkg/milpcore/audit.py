"""
Feasibility audit of a variable assignment against a MilpModel.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

import config
from milpcore.model import LinearConstraint, MilpModel, VarKind

logger = logging.getLogger(__name__)

RESIDUAL_COLUMNS = ['constraint', 'tag', 'relation', 'lhs', 'rhs', 'residual', 'tolerance', 'violated']


@dataclass
class AuditReport:
    """Per-row residuals plus bound, integrality and SOS2 checks."""

    residuals: pd.DataFrame
    bound_violations: List[Tuple[str, float]] = field(default_factory=list)
    integrality_violations: List[Tuple[str, float]] = field(default_factory=list)
    sos2_violations: List[str] = field(default_factory=list)
    objective: float = 0.0

    @property
    def violated_rows(self) -> pd.DataFrame:
        return self.residuals[self.residuals['violated']].sort_values('residual', ascending=False, kind='mergesort')

    @property
    def is_feasible(self) -> bool:
        return (self.violated_rows.empty and not self.bound_violations
                and not self.integrality_violations and not self.sos2_violations)

    @property
    def max_residual(self) -> float:
        return float(self.residuals['residual'].max()) if not self.residuals.empty else 0.0

    def worst(self, count: int = 10) -> pd.DataFrame:
        """Rows with the largest residuals, violated or not."""
        return self.residuals.sort_values('residual', ascending=False, kind='mergesort').head(count)

    def summary(self) -> dict:
        worst = self.violated_rows
        return {
            'feasible': self.is_feasible,
            'rows': int(len(self.residuals)),
            'violated_rows': int(len(worst)),
            'max_residual': self.max_residual,
            'worst_row': None if worst.empty else str(worst.iloc[0]['constraint']),
            'bound_violations': len(self.bound_violations),
            'integrality_violations': len(self.integrality_violations),
            'sos2_violations': len(self.sos2_violations),
            'objective': self.objective,
        }


def relative_tolerance(rel: float = 1e-6) -> Callable[[LinearConstraint, np.ndarray], float]:
    """Row tolerance rel·max(1, |rhs|, Σ|a_j·x_j|)."""
    def tolerance(row: LinearConstraint, values: np.ndarray) -> float:
        scale = sum(abs(coef * values[var_id]) for var_id, coef in row.terms)
        return rel * max(1.0, abs(row.rhs), scale)
    return tolerance


def mixed_tolerance(model: MilpModel, mass_tol: float = config.PlanAuditDefaults.MASS_TOL_KG,
                    discrete_tol: float = config.PlanAuditDefaults.DISCRETE_TOL):
    """Absolute tolerance: mass_tol on rows touching a continuous variable, discrete_tol otherwise."""
    continuous = np.array([var.kind is VarKind.CONTINUOUS for var in model.variables], dtype=bool)

    def tolerance(row: LinearConstraint, values: np.ndarray) -> float:
        return mass_tol if any(continuous[var_id] for var_id, _ in row.terms) else discrete_tol
    return tolerance


def audit_assignment(model: MilpModel, values: Union[Sequence[float], np.ndarray],
                     tolerance: Optional[Callable[[LinearConstraint, np.ndarray], float]] = None,
                     bound_tol: float = 1e-6,
                     integrality_tol: float = config.SolverDefaults.INTEGRALITY_TOL) -> AuditReport:
    """
    Check an assignment against every row, bound, integrality and SOS2 declaration.

    Args:
        model: Model to audit against
        values: One value per variable, in id order
        tolerance: Row tolerance function. Defaults to relative_tolerance(1e-6).
        bound_tol: Absolute slack on variable bounds
        integrality_tol: Distance to the nearest integer for integer/binary variables

    Returns:
        AuditReport: Residual table sorted by model row order
    """
    values = np.asarray(values, dtype=float)
    if values.shape != (len(model.variables),):
        raise ValueError(f"Expected {len(model.variables)} values, got shape {values.shape}")
    tolerance = tolerance or relative_tolerance()

    records = []
    for row in model.constraints:
        lhs = row.evaluate(values)
        residual = row.residual(values)
        tol = tolerance(row, values)
        records.append((row.name, row.tag, row.relation.value, lhs, row.rhs, residual, tol, residual > tol))
    residuals = pd.DataFrame.from_records(records, columns=RESIDUAL_COLUMNS)

    bound_violations, integrality_violations = [], []
    for var in model.variables:
        value = values[var.id]
        if value < var.lower - bound_tol or value > var.upper + bound_tol:
            bound_violations.append((var.name, float(value)))
        if var.kind.is_integral and abs(value - round(value)) > integrality_tol:
            integrality_violations.append((var.name, float(value)))
    sos2_violations = [sos.name for sos in model.sos2_sets if not sos.is_satisfied(values, integrality_tol)]

    report = AuditReport(residuals, bound_violations, integrality_violations, sos2_violations,
                         model.objective_value(values))
    if report.is_feasible:
        logger.debug(f"Audit passed: {len(residuals)} rows, max residual {report.max_residual:.3g}")
    else:
        summary = report.summary()
        logger.info(f"Audit found {summary['violated_rows']} violated rows (worst: {summary['worst_row']}), "
                    f"{summary['bound_violations']} bound, {summary['integrality_violations']} integrality and "
                    f"{summary['sos2_violations']} SOS2 violations")
    return report
