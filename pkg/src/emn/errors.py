"""Exception types shared across the package."""


class EmnError(Exception):
    """Base class for errors raised by this package."""


class EntropyUnavailableError(EmnError):
    """The platform's cryptographic randomness facility could not be used."""


class InsufficientSampleError(EmnError, ValueError):
    pass


class DegenerateSampleError(EmnError, ValueError):
    """Raised when a statistic is undefined, e.g. zero variance."""


class NumericFailureError(EmnError, ArithmeticError):
    pass


class MetricError(EmnError):
    """A metric failed while building a report; ``metric`` names which one."""

    def __init__(self, metric: str, cause: Exception):
        super().__init__(f"{metric}: {cause}")
        self.metric = metric
        self.cause = cause
