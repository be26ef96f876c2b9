"""Exception and warning types raised across the package."""


class RealZerosError(Exception):
    """Base class for all package errors."""


class NoDensity(RealZerosError):
    """The covariance model has no spectral density (spectral atom)."""


class QuadratureFailure(RealZerosError):
    """Adaptive quadrature could not meet its tolerance."""


class DegenerateMoment(RealZerosError):
    """A(x) <= 0, so the Kac-Rice quotient is undefined."""


class OutsideWindow(RealZerosError):
    """Asymptotic moment forms requested outside the (delta, eps) window."""


class BadDegree(RealZerosError):
    """Degree too small for the endpoint window to be well ordered."""


class SamplingFailure(RealZerosError):
    """Neither circulant embedding nor jittered Cholesky produced a sampler."""


class DegreeTooLarge(RealZerosError):
    pass


class ZeroPolynomial(RealZerosError):
    pass


class ConfigError(RealZerosError):
    pass


class ParseError(RealZerosError):
    pass


class NotPSDWarning(UserWarning):
    """A covariance sequence has a negative spectral density somewhere."""


class BudgetExceeded(RuntimeWarning):
    """Grid refinement hit its doubling limit before the count stabilised."""
