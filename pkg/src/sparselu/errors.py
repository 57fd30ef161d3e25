"""Exception types raised across the library."""


class ShapeError(ValueError):
    """Operands have incompatible or unsupported dimensions."""


class ParameterError(ValueError):
    """A scalar parameter is outside its admissible range."""


class MatrixMarketError(ValueError):
    """A Matrix Market file could not be parsed.

    Carries the 1-based line number where parsing failed (0 when the
    problem is not tied to a specific line, e.g. truncated input).
    """

    def __init__(self, message, line=0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


class SingularMatrixError(ValueError):
    """A matrix required to have full column rank is (numerically) rank
    deficient.  ``cond`` holds the observed ratio of extreme singular
    values, ``inf`` when the smallest one is exactly zero."""

    def __init__(self, message, cond=float("inf")):
        super().__init__(message)
        self.cond = cond


class DecompositionError(RuntimeError):
    """A randomized decomposition failed even after resampling."""
