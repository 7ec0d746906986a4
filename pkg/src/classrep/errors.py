"""Exception hierarchy shared by every classrep module."""


class ClassrepError(Exception):
    """Base class for all errors raised by classrep."""


class DomainError(ClassrepError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class RangeError(ClassrepError, OverflowError):
    """A result is not representable as a finite double."""


class NumericalError(ClassrepError, ArithmeticError):
    """A numerical procedure failed to deliver a trustworthy result."""


class ConvergenceError(NumericalError):
    """An iterative procedure stopped before reaching its tolerance.

    Attributes:
        estimate: Last available estimate of the quantity, if any
        error_bound: Estimated error of that estimate, if known
    """

    def __init__(
        self,
        message: str,
        estimate: float | None = None,
        error_bound: float | None = None,
    ):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class IntegrabilityError(NumericalError):
    """A distribution diverges too strongly at small energy to be integrated.

    Attributes:
        exponent: Fitted power-law exponent of the distribution near zero
    """

    def __init__(self, message: str, exponent: float):
        super().__init__(message)
        self.exponent = exponent


class ConfigurationError(ClassrepError):
    """A run configuration is invalid or cannot be loaded."""
