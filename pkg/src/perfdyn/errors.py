"""Semantic exception hierarchy.

Public functions raise these instead of bare ValueError so callers (and the
CLI) can map failures to exit codes and structured reports.
"""


class PerfdynError(Exception):
    """Base error for this package."""


class InvalidInputError(PerfdynError, ValueError):
    """Inputs violate a documented contract (domain, shape, definiteness)."""


class UnsupportedModeError(PerfdynError):
    """An evaluation mode was requested that the object cannot provide,
    e.g. exact mode without a declared closed form or discrete support."""


class UnsupportedDimensionError(PerfdynError):
    """Operation only defined for a specific dimensionality."""


class RegimeViolationError(PerfdynError):
    """Parameters fall outside the validity regime of a closed form."""


class DegenerateSupportError(PerfdynError):
    """A density vanished where it must be strictly positive."""


class ScheduleModeError(PerfdynError):
    """Aggregation weights incompatible with the requested mode
    (signed weights are legal only with closed-form moments)."""


class InnerSolverError(PerfdynError):
    """Inner minimization did not converge. Carries diagnostics."""

    def __init__(self, message, last_iterate=None, grad_norm=None, iterations=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.grad_norm = grad_norm
        self.iterations = iterations


class FixedPointSolveError(PerfdynError):
    """A fixed-point solve failed to contract. Carries diagnostics."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class IngestionError(PerfdynError):
    """A data file violates the expected schema. Carries the offending row."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class ConfigError(PerfdynError):
    """Experiment configuration is unreadable or invalid."""
