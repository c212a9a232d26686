"""Exception types shared across the package."""


class HeatEMDError(Exception):
    """Base class for all package errors."""


class SignalFormatError(HeatEMDError, ValueError):
    """Input data could not be parsed into a valid signal."""


class DomainError(HeatEMDError, ValueError):
    """A numeric argument lies outside the domain of a formula or solver."""


class InsufficientExtremaError(HeatEMDError):
    """Raised when a signal has too few extrema to build envelopes.

    Decomposition loops treat this as the signal that the residual stage has
    been reached.
    """


class EstimationError(HeatEMDError):
    """A parameter estimator found no usable feature in the signal."""
