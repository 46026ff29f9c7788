"""Exception types raised by the solvers and helpers."""


class InvalidInputError(ValueError):
    """Input matrix is malformed (non-finite, wrong dimensionality)."""


class UsageError(ValueError):
    """A caller-supplied option is out of its admissible range."""


class InvalidParameterError(ValueError):
    """A solution-family parameter violates one of its defining conditions.

    The ``condition`` attribute names the failed condition.
    """

    def __init__(self, condition, message=None):
        self.condition = condition
        super().__init__(message or f"parameter condition violated: {condition}")


class SeedDeficientError(RuntimeError):
    """The sampled seed block never reached the requested rank."""


class MatrixParseError(ValueError):
    """A matrix CSV file could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
