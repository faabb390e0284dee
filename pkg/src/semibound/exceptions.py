"""Exception hierarchy shared by the package."""


class SemiboundError(Exception):
    """Base class for all package errors."""


class DomainError(SemiboundError, ValueError):
    """A potential was evaluated outside its domain (r <= 0, outside a table)."""


class ExpressionError(SemiboundError, ValueError):
    """Syntax or semantic error in a potential expression."""

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class NoAttractiveRegion(SemiboundError):
    """The potential is nonnegative everywhere on the scanned range."""


class NumericalError(SemiboundError, RuntimeError):
    """A numerical procedure failed to reach its tolerance."""


class IntegrationError(NumericalError):
    """ODE integration failed (step-size underflow, too many steps)."""


class NonIntegrableError(NumericalError):
    """The semiclassical integrand is not integrable at an endpoint."""


class StageError(SemiboundError):
    """A report stage failed; ``stage`` names which one."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"{stage}: {cause}")
