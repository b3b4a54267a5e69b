"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class OutOfRange(ValueError):
    """A probability level lies outside the reachable range of a CDF."""


class NonConvergence(RuntimeError):
    """Adaptive quadrature exhausted its subdivision budget."""


class RejectionBudgetExceeded(RuntimeError):
    """A rejection sampler hit its attempt cap before accepting."""

    def __init__(self, attempts, message=None):
        self.attempts = attempts
        super().__init__(message or f"no acceptance within {attempts} attempts")


class EmptyBatch(ValueError):
    """An empirical operation received a batch with no draws."""
