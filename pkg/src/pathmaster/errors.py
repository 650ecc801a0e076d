"""Exception hierarchy shared by every module.

The CLI maps ``UsageError`` subclasses to exit code 2 and everything else
derived from ``PathMasterError`` to exit code 1.
"""


class PathMasterError(Exception):
    """Base class for library errors."""


class DomainError(PathMasterError, ValueError):
    """An argument lies outside the domain of the operation."""


class ShapeError(PathMasterError, ValueError):
    """Arrays or grids do not line up."""


class UnsupportedError(PathMasterError, NotImplementedError):
    """The request is well formed but deliberately not supported."""


class ConfigurationError(PathMasterError, ValueError):
    """A required ingredient (derivative, id, pairing) is missing or invalid."""


class InstanceError(PathMasterError, ValueError):
    """Instance preconditions of an experiment are violated."""


class EvaluationError(PathMasterError, ArithmeticError):
    """A functional returned a non-finite value."""


class SimulationFault(PathMasterError, RuntimeError):
    """A particle state became non-finite during time stepping."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class UsageError(PathMasterError, ValueError):
    """A run configuration violates its command schema."""
