"""Exception types shared across the package."""


class InvalidCovarianceError(ValueError):
    """The input is not a usable covariance matrix.

    Raised when a matrix is not symmetric, not positive definite, or
    (where a routine requires it) describes an unphysical state.
    """


class IncompatibleSpectraError(ValueError):
    """No Gaussian state has the requested global and local parameters."""


class InfeasibleRedistributionError(ValueError):
    """A two-mode redistribution target lies outside the reachable range."""


class UnphysicalSpectrumError(ValueError):
    """A global spectral parameter lies below the vacuum value 1."""


class NumericalError(RuntimeError):
    """A numerical routine failed to reach its advertised accuracy."""
