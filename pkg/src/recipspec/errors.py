"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of the operation."""


class UnsupportedOrderError(DomainError):
    """A coefficient order with no closed-form expression was requested."""


class ConfigError(ValueError):
    """A configuration object violates its invariants."""


class AccuracyError(RuntimeError):
    """Requested accuracy was not reached within the term/node budget.

    Carries the best available value and a tail/error estimate so callers
    can decide whether the partial result is still usable.
    """

    def __init__(self, message, partial_value=None, tail_estimate=None):
        super().__init__(message)
        self.partial_value = partial_value
        self.tail_estimate = tail_estimate


class TruncationError(RuntimeError):
    """A series truncation flag was raised where a clean value was required."""


class ConsistencyError(RuntimeError):
    """An internal cross-check failed (e.g. a Hermitian transform residue)."""


class StatisticalQualityError(RuntimeError):
    """An estimator does not meet its statistical quality requirements."""
