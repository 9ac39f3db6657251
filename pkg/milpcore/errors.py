"""
Exceptions raised while assembling a MILP from an event network.
"""

from trajmodels.errors import BadBreakpoints  # noqa: F401  shared with the surrogate containers


class ModelError(ValueError):
    """Base class for model construction errors."""


class MissingSurrogate(ModelError):
    def __init__(self, arc_name):
        self.arc_name = arc_name
        super().__init__(f"Transport arc {arc_name} has no surrogate for its vehicle")


class MissingTofModel(ModelError):
    def __init__(self, arc_name):
        self.arc_name = arc_name
        super().__init__(f"Transport arc {arc_name} has no time-of-flight model")


class UnknownPolicyTarget(ModelError):
    def __init__(self, policy, target):
        self.policy = policy
        self.target = target
        super().__init__(f"Policy '{policy}' refers to '{target}', which is not in the commodity schema")


class DanglingReference(ModelError):
    """A constraint, objective term or SOS2 set refers to a variable that does not exist."""


class LpFormatError(ModelError):
    def __init__(self, message, line_number=None):
        self.line_number = line_number
        prefix = f"line {line_number}: " if line_number is not None else ''
        super().__init__(prefix + message)
