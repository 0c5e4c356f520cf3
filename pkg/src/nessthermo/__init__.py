"""Steady-state thermometry of harmonic probe chains in bosonic baths."""

from .bath import BathSpec, ProbeChain, Scenario
from .errors import (
    ConfigError,
    DegenerateMeasurement,
    DegenerateState,
    DomainError,
    InvalidPartition,
    NessThermoError,
    OracleConfigError,
    QuadratureError,
    SldSingular,
    UnstableModel,
)
from .gaussian import (
    CovMatrix,
    log_negativity,
    mutual_information,
    position_block,
    momentum_block,
    symplectic_eigenvalues,
    symplectic_form,
)
from .metrology import (
    FisherResult,
    Measurement,
    SldQuadratic,
    cfi_gaussian_measurement,
    fisher_point,
    min_relative_error,
    qfi,
    solve_sld,
)
from .oracle import DiscreteBath, evolve_covariance
from .solver import (
    CorrelationKind,
    NessProblem,
    NessSolution,
    QuadratureConfig,
    correlation_profile,
    covariance_temperature_derivative,
    solve_steady_state,
    steady_state_covariance,
    steady_state_family,
)

__all__ = [
    "BathSpec", "ProbeChain", "Scenario", "CovMatrix", "CorrelationKind",
    "NessProblem", "NessSolution", "QuadratureConfig", "DiscreteBath",
    "FisherResult", "Measurement", "SldQuadratic",
    "symplectic_form", "symplectic_eigenvalues", "log_negativity",
    "mutual_information", "position_block", "momentum_block",
    "solve_steady_state", "steady_state_covariance", "steady_state_family",
    "covariance_temperature_derivative", "correlation_profile",
    "solve_sld", "qfi", "cfi_gaussian_measurement", "min_relative_error",
    "fisher_point", "evolve_covariance",
    "NessThermoError", "DomainError", "DegenerateState", "InvalidPartition",
    "UnstableModel", "QuadratureError", "SldSingular", "DegenerateMeasurement",
    "OracleConfigError", "ConfigError",
]
