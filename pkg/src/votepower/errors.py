"""Exception types shared across the package."""


class VotePowerError(Exception):
    """Base class for library-specific failures."""


class InvalidDimensionError(VotePowerError, ValueError):
    """Player count is zero or otherwise unusable."""


class InvalidRankError(VotePowerError, ValueError):
    """Order-statistic rank k outside 1..n."""


class InvalidArgumentsError(VotePowerError, ValueError):
    """Arguments violate a documented precondition."""


class DegenerateDistributionError(VotePowerError):
    """The requested distribution is a point mass and has no density."""


class BudgetExceededError(VotePowerError):
    """Player count exceeds the documented enumeration budget."""


class AccuracyUnsupportedError(VotePowerError):
    """Inputs lie outside the validated accuracy range; refusing to
    return a possibly garbage value."""


class ConvergenceFailureError(VotePowerError):
    """A numeric iteration did not converge within its budget.

    ``estimates`` carries the last two successive values so the caller
    can judge how far apart they were.
    """

    def __init__(self, message: str, estimates: tuple | None = None):
        super().__init__(message)
        self.estimates = estimates
