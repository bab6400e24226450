"""Exception types shared across the package."""


class ToolkitError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(ToolkitError):
    """A probability table, kernel, or covariance model violates its invariants."""


class UsageError(ToolkitError):
    """An operation was called with arguments outside its contract."""


class InfeasibleRateError(UsageError):
    """The requested code rate cannot be realized by the codebook construction."""


class DegenerateGeometryError(ToolkitError):
    """A closed-form expression is undefined for these parameters.

    Carries the offending subexpression and its value so that sweeps can
    report exactly what collapsed instead of dying on a log of zero.
    """

    def __init__(self, message: str, expression: str | None = None,
                 value: float | None = None):
        super().__init__(message)
        self.expression = expression
        self.value = value
