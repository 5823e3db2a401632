"""Exception types raised across the package."""


class HistkitError(Exception):
    """Base class for all package errors."""


class DimensionError(HistkitError, ValueError):
    """Operands have incompatible or oversized dimensions."""


class ValidationError(HistkitError, ValueError):
    """An input violates a structural invariant (not Hermitian, not a projection, ...)."""


class PreconditionError(HistkitError, ValueError):
    """A numerical precondition of an algorithm is not met.

    ``residual`` carries the measured quantity that failed, when there is one.
    """

    def __init__(self, message, residual=None, index=None, threshold=None):
        super().__init__(message)
        self.residual = residual
        self.index = index
        self.threshold = threshold


class ConvergenceError(HistkitError, ArithmeticError):
    """An iterative solver hit its iteration cap."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual
