"""Exception types shared across the package."""


class NessThermoError(Exception):
    """Base class for all package errors."""


class DomainError(NessThermoError):
    """An argument lies outside the mathematical domain of an operation."""


class DegenerateState(NessThermoError):
    """A covariance matrix is not positive definite where it must be."""


class InvalidPartition(NessThermoError):
    """A mode bipartition is empty, full, or out of range."""


class UnstableModel(NessThermoError):
    """The probe-bath model has no steady state (undamped or unstable mode)."""


class QuadratureError(NessThermoError):
    """Adaptive quadrature failed to reach the requested tolerance.

    Carries the best value and the achieved error estimate.
    """

    def __init__(self, message, value=None, error_estimate=None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


class SldSingular(NessThermoError):
    """The symmetric-logarithmic-derivative linear system could not be solved."""


class DegenerateMeasurement(NessThermoError):
    """A Gaussian measurement leads to a singular outcome covariance."""


class OracleConfigError(NessThermoError):
    """Discrete-bath oracle configuration violates its validity window."""


class ConfigError(NessThermoError):
    """An experiment configuration file is malformed."""
