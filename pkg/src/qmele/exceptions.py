"""Error types shared across the package.

ValueError subclasses signal bad inputs (data/domain problems);
ArithmeticError subclasses signal numeric failures during computation.
The CLI maps the two families onto distinct exit codes.
"""


class DomainError(ValueError):
    """An argument violates a documented precondition."""


class InsufficientDataError(DomainError):
    """Series too short for the requested model dimension."""


class UnsupportedOrderError(DomainError):
    """Operation only defined for specific model orders."""


class DegenerateSampleError(ValueError):
    """Sample carries no usable variation (ties, constant series)."""


class DataIngestError(ValueError):
    """CSV/config input could not be parsed; message carries context."""


class NumericOverflowError(ArithmeticError):
    """A recursion produced a non-finite or absurdly large value.

    Attributes
    ----------
    t : int
        1-based time index of the first offending value, when known.
    """

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class SingularInformationError(ArithmeticError):
    """An information-type matrix is numerically singular."""
