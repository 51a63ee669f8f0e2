"""Exception hierarchy shared by every hetring module."""


class HetRingError(Exception):
    """Base class for all library errors."""


class ValidationError(HetRingError, ValueError):
    """Malformed input: wrong shapes, self-loops, bad file contents."""


class DomainError(HetRingError, ValueError):
    """Input is well-formed but outside the mathematical domain of the operation."""


class StabilityRegimeError(DomainError):
    """Fixed points are not saddles (r * exp(-gamma * xhat) >= 1)."""


class UnsupportedError(HetRingError):
    """The operation is not defined for this kind of input."""


class UnsupportedCycleError(UnsupportedError):
    """Cycle with varying active count or more than one displaced node per connection."""


class BudgetExceededError(HetRingError):
    """An enumeration produced more results than its configured budget allows."""


class InsufficientDataError(HetRingError):
    """Not enough epochs, boundaries or valley points for the requested analysis."""


class DegenerateFitError(HetRingError):
    """Least-squares design matrix is rank deficient."""


class NumericError(HetRingError):
    """A numerical routine failed to reach its tolerance.

    ``best`` carries the best iterate found so callers can inspect it.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class SimulationError(HetRingError):
    """NaN or overflow in the coupled map; ``iteration`` is the offending step."""

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration
