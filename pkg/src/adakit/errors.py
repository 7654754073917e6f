"""Exception types shared across the package."""


class AdakitError(Exception):
    """Base class for package errors."""


class InsufficientPrecision(AdakitError):
    """A verdict depends on terms hidden below an error bound."""


class NotLogDerivShape(AdakitError):
    """The element is not a monomial's logarithmic derivative plus a small residual."""


class LogDivergent(AdakitError):
    """Integration would leave the field (a logarithm would be needed)."""


class DominanceFailure(AdakitError):
    """A dominance precondition of an algorithm does not hold."""


class NonConvergence(AdakitError):
    """An iteration did not settle within its cap."""


class DivByZero(AdakitError, ZeroDivisionError):
    """Division by an exact zero."""


class VerificationError(AdakitError):
    """A supplied witness does not verify; ``residual`` carries the mismatch."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class PreconditionError(AdakitError, ValueError):
    """An operation was called outside the inputs it is defined for."""
