"""
Solver-neutral MILP container: variables, linear rows, SOS2 sets and a linear objective.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp

from milpcore.errors import DanglingReference, ModelError

logger = logging.getLogger(__name__)

Terms = Union[Mapping[int, float], Iterable[Tuple[int, float]]]


class VarKind(str, Enum):
    CONTINUOUS = 'continuous'
    INTEGER = 'integer'
    BINARY = 'binary'

    @property
    def is_integral(self) -> bool:
        return self is not VarKind.CONTINUOUS


class Provenance(str, Enum):
    FLOW_PLUS = 'flow_plus'
    FLOW_MINUS = 'flow_minus'
    HOLD_PLUS = 'hold_plus'
    HOLD_MINUS = 'hold_minus'
    MASS_PLUS = 'mass_plus'
    MASS_MINUS = 'mass_minus'
    LAYER_DURATION = 'layer_duration'
    SOS2_WEIGHT = 'sos2_weight'
    TOF_WEIGHT = 'tof_weight'
    OTHER = 'other'


class Relation(str, Enum):
    LE = '<='
    EQ = '='
    GE = '>='

    @property
    def code(self) -> str:
        return {'<=': 'L', '=': 'E', '>=': 'G'}[self.value]


@dataclass(frozen=True)
class Variable:
    id: int
    name: str
    kind: VarKind
    lower: float = 0.0
    upper: float = math.inf
    provenance: Provenance = Provenance.OTHER
    arc: Optional[str] = None
    commodity: Optional[str] = None


@dataclass(frozen=True)
class LinearConstraint:
    """A row Σ a_j x_j (relation) rhs; terms are pre-summed and sorted by variable id."""

    name: str
    terms: Tuple[Tuple[int, float], ...]
    relation: Relation
    rhs: float
    tag: str = ''

    def evaluate(self, values: np.ndarray) -> float:
        return float(sum(coef * values[var_id] for var_id, coef in self.terms))

    def residual(self, values: np.ndarray) -> float:
        """Amount by which the row is violated (0 when satisfied)."""
        lhs = self.evaluate(values)
        if self.relation is Relation.LE:
            return max(0.0, lhs - self.rhs)
        if self.relation is Relation.GE:
            return max(0.0, self.rhs - lhs)
        return abs(lhs - self.rhs)


@dataclass(frozen=True)
class Sos2Set:
    """λ₁..λ_N in order; at most two consecutive members may be nonzero."""

    name: str
    members: Tuple[int, ...]
    weights: Tuple[float, ...] = ()

    def is_satisfied(self, values: np.ndarray, tol: float = 1e-9) -> bool:
        nonzero = [k for k, var_id in enumerate(self.members) if abs(values[var_id]) > tol]
        return len(nonzero) <= 1 or (len(nonzero) == 2 and nonzero[1] - nonzero[0] == 1)


@dataclass
class ModelArrays:
    """Dense/sparse view of a MilpModel for the solver."""

    c: np.ndarray
    A: sp.csr_matrix
    senses: np.ndarray
    rhs: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    integrality: np.ndarray
    sos2: List[np.ndarray] = field(default_factory=list)
    objective_constant: float = 0.0


def sum_terms(terms: Terms) -> Dict[int, float]:
    """Merge duplicate variable ids and drop zero coefficients."""
    items = terms.items() if isinstance(terms, Mapping) else terms
    merged: Dict[int, float] = {}
    for var_id, coef in items:
        merged[int(var_id)] = merged.get(int(var_id), 0.0) + float(coef)
    return {var_id: coef for var_id, coef in merged.items() if coef != 0.0}


class MilpModel:
    """
    Minimization MILP built incrementally and frozen before solving.

    Bounds stay adjustable until freeze(); afterwards the model is read-only and
    safe to share across threads.
    """

    def __init__(self, name: str = 'model'):
        self.name = name
        self.sense = 'minimize'
        self.variables: List[Variable] = []
        self.constraints: List[LinearConstraint] = []
        self.sos2_sets: List[Sos2Set] = []
        self.objective: Dict[int, float] = {}
        self.objective_constant = 0.0
        self._names: Dict[str, int] = {}
        self._row_names: Dict[str, int] = {}
        self._frozen = False
        self._arrays: Optional[ModelArrays] = None

    def __repr__(self):
        return (f"MilpModel('{self.name}', variables={len(self.variables)}, "
                f"constraints={len(self.constraints)}, sos2={len(self.sos2_sets)})")

    def _check_mutable(self):
        if self._frozen:
            raise ModelError(f"Model '{self.name}' is frozen")

    def _check_ids(self, ids: Iterable[int], context: str):
        count = len(self.variables)
        for var_id in ids:
            if not 0 <= var_id < count:
                raise DanglingReference(f"{context} refers to unknown variable id {var_id}")

    @property
    def frozen(self) -> bool:
        return self._frozen

    def freeze(self) -> 'MilpModel':
        self._frozen = True
        return self

    def add_variable(self, name: str, kind: VarKind = VarKind.CONTINUOUS, lower: float = 0.0,
                     upper: float = math.inf, provenance: Provenance = Provenance.OTHER,
                     arc: Optional[str] = None, commodity: Optional[str] = None) -> int:
        """
        Add a variable and return its id.

        Raises:
            ModelError: Duplicate name, lower > upper, or binary bounds outside [0, 1]
        """
        self._check_mutable()
        if name in self._names:
            raise ModelError(f"Duplicate variable name '{name}'")
        kind = VarKind(kind)
        if kind is VarKind.BINARY:
            lower, upper = max(lower, 0.0), min(upper, 1.0)
        if lower > upper:
            raise ModelError(f"Variable '{name}' has lower bound {lower} above upper bound {upper}")
        var_id = len(self.variables)
        self.variables.append(Variable(var_id, name, kind, float(lower), float(upper), Provenance(provenance),
                                       arc, commodity))
        self._names[name] = var_id
        self._arrays = None
        return var_id

    def var_id(self, name: str) -> int:
        try:
            return self._names[name]
        except KeyError:
            raise DanglingReference(f"Unknown variable '{name}'") from None

    def variable(self, name: str) -> Variable:
        return self.variables[self.var_id(name)]

    def has_variable(self, name: str) -> bool:
        return name in self._names

    def set_bounds(self, var_id: int, lower: Optional[float] = None, upper: Optional[float] = None):
        self._check_mutable()
        var = self.variables[var_id]
        lower = var.lower if lower is None else float(lower)
        upper = var.upper if upper is None else float(upper)
        if lower > upper:
            raise ModelError(f"Variable '{var.name}' would get lower bound {lower} above upper bound {upper}")
        self.variables[var_id] = replace(var, lower=lower, upper=upper)
        self._arrays = None

    def fix(self, var_id: int, value: float):
        self.set_bounds(var_id, value, value)

    def add_constraint(self, name: str, terms: Terms, relation: Union[Relation, str], rhs: float,
                       tag: str = '') -> LinearConstraint:
        """Add a row; duplicate ids are summed and zero coefficients dropped."""
        self._check_mutable()
        if name in self._row_names:
            raise ModelError(f"Duplicate constraint name '{name}'")
        merged = sum_terms(terms)
        self._check_ids(merged, f"Constraint '{name}'")
        row = LinearConstraint(name, tuple(sorted(merged.items())), Relation(relation), float(rhs), tag)
        self._row_names[name] = len(self.constraints)
        self.constraints.append(row)
        self._arrays = None
        return row

    def constraint(self, name: str) -> LinearConstraint:
        return self.constraints[self._row_names[name]]

    def add_sos2(self, name: str, members: Sequence[int], weights: Optional[Sequence[float]] = None) -> Sos2Set:
        self._check_mutable()
        members = tuple(int(m) for m in members)
        self._check_ids(members, f"SOS2 set '{name}'")
        if len(set(members)) != len(members):
            raise ModelError(f"SOS2 set '{name}' repeats a member")
        weights = tuple(float(w) for w in weights) if weights is not None else tuple(range(1, len(members) + 1))
        if len(weights) != len(members):
            raise ModelError(f"SOS2 set '{name}' has {len(members)} members but {len(weights)} weights")
        sos = Sos2Set(name, members, weights)
        self.sos2_sets.append(sos)
        self._arrays = None
        return sos

    def add_objective_terms(self, terms: Terms):
        self._check_mutable()
        merged = sum_terms(terms)
        self._check_ids(merged, 'Objective')
        for var_id, coef in merged.items():
            total = self.objective.get(var_id, 0.0) + coef
            if total == 0.0:
                self.objective.pop(var_id, None)
            else:
                self.objective[var_id] = total
        self._arrays = None

    def objective_value(self, values: np.ndarray) -> float:
        return self.objective_constant + float(sum(coef * values[var_id] for var_id, coef in self.objective.items()))

    def to_arrays(self) -> ModelArrays:
        """Matrix form (cached until the next modification)."""
        if self._arrays is not None:
            return self._arrays
        n, m = len(self.variables), len(self.constraints)
        c = np.zeros(n)
        for var_id, coef in self.objective.items():
            c[var_id] = coef
        rows, cols, data = [], [], []
        for i, row in enumerate(self.constraints):
            for var_id, coef in row.terms:
                rows.append(i)
                cols.append(var_id)
                data.append(coef)
        A = sp.csr_matrix((data, (rows, cols)), shape=(m, n))
        self._arrays = ModelArrays(
            c=c,
            A=A,
            senses=np.array([row.relation.code for row in self.constraints], dtype='<U1'),
            rhs=np.array([row.rhs for row in self.constraints], dtype=float),
            lb=np.array([var.lower for var in self.variables], dtype=float),
            ub=np.array([var.upper for var in self.variables], dtype=float),
            integrality=np.array([var.kind.is_integral for var in self.variables], dtype=bool),
            sos2=[np.array(sos.members, dtype=int) for sos in self.sos2_sets],
            objective_constant=self.objective_constant,
        )
        return self._arrays

    def statistics(self) -> Dict[str, int]:
        fixed = sum(1 for var in self.variables if var.lower == var.upper)
        return {
            'variables': len(self.variables),
            'integer_variables': sum(1 for var in self.variables if var.kind.is_integral),
            'fixed_variables': fixed,
            'constraints': len(self.constraints),
            'nonzeros': sum(len(row.terms) for row in self.constraints),
            'sos2_sets': len(self.sos2_sets),
        }

    def values_by_name(self, values: np.ndarray) -> Dict[str, float]:
        return {var.name: float(values[var.id]) for var in self.variables}


def check_references(model: MilpModel, strict: bool = True) -> List[str]:
    """
    Referential-integrity audit of rows, objective and SOS2 sets.

    Returns:
        List[str]: Problems found (empty when the model is consistent)
    """
    count = len(model.variables)
    problems = []
    for row in model.constraints:
        seen = set()
        for var_id, _ in row.terms:
            if not 0 <= var_id < count:
                problems.append(f"Constraint '{row.name}' refers to unknown variable id {var_id}")
            if var_id in seen:
                problems.append(f"Constraint '{row.name}' repeats variable id {var_id}")
            seen.add(var_id)
    for var_id in model.objective:
        if not 0 <= var_id < count:
            problems.append(f"Objective refers to unknown variable id {var_id}")
    for sos in model.sos2_sets:
        for var_id in sos.members:
            if not 0 <= var_id < count:
                problems.append(f"SOS2 set '{sos.name}' refers to unknown variable id {var_id}")
    for var in model.variables:
        if var.lower > var.upper:
            problems.append(f"Variable '{var.name}' has crossed bounds")
    if problems and strict:
        raise DanglingReference('; '.join(problems[:5]))
    return problems
