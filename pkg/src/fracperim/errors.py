"""Exception types shared across the package."""


class FracperimError(Exception):
    """Base class for all package errors."""


class InvalidInputError(FracperimError, ValueError):
    """Arguments outside an operation's admissible range."""


class DimensionMismatchError(InvalidInputError):
    """Point coordinates do not match the geometry's chart size."""


class UnsupportedRegionError(FracperimError):
    """Region/geometry combination with no closed-form measure or no quadrature path."""


class SamplingError(FracperimError):
    """Sampling from a region is impossible or pathologically inefficient."""


class SingularInputError(InvalidInputError):
    """Evaluation requested on the diagonal of a singular kernel."""


class DegenerateInversionError(InvalidInputError):
    """Heat-density inversion attempted in the equal-measure regime."""


class PrecisionError(FracperimError):
    """Quadrature failed to converge; carries the best available estimate."""

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound
