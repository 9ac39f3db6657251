"""
Solver-neutral MILP formulation of event-driven network flows.
"""

from milpcore.audit import AuditReport, audit_assignment, mixed_tolerance, relative_tolerance
from milpcore.builder import FlowVariableBlock, NetworkMilpBuilder, PwlTofBlock, build_milp, transformation_matrix
from milpcore.errors import (
    BadBreakpoints,
    DanglingReference,
    LpFormatError,
    MissingSurrogate,
    MissingTofModel,
    ModelError,
    UnknownPolicyTarget,
)
from milpcore.lp_format import model_to_lp_string, read_lp, write_lp
from milpcore.model import (
    LinearConstraint,
    MilpModel,
    ModelArrays,
    Provenance,
    Relation,
    Sos2Set,
    Variable,
    VarKind,
    check_references,
)
from milpcore.policies import (
    BaseConcurrencyPolicy,
    DroptankSizingPolicy,
    FuelCapacityPolicy,
    UpperStageSizingPolicy,
    ZeroFlowPolicy,
)
