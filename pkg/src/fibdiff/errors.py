"""Exception hierarchy shared by every stage of the pipeline."""


class FibDiffError(Exception):
    """Base class for all errors raised by this package."""

    kind = "error"


class DomainError(FibDiffError, ValueError):
    kind = "domain"


class CapacityError(FibDiffError, ValueError):
    kind = "capacity"


class PrecisionExhausted(FibDiffError, ArithmeticError):
    """Raised when an interval cannot be resolved below the precision cap."""

    kind = "precision-exhaustion"


class NotIrrational(DomainError):
    kind = "not-irrational"


class UnhandledResidual(FibDiffError):
    """A residual n - m value that no implemented elimination rule covers."""

    kind = "unhandled-residual"


class StageFailure(FibDiffError):
    kind = "stage-failure"


class ReductionFailed(FibDiffError):
    """No convergent in the allowed window gave a usable reduction."""

    kind = "reduction-failed"
