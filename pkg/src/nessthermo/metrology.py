"""Temperature estimation bounds for Gaussian steady states.

The symmetric logarithmic derivative of a zero-mean Gaussian family is
quadratic in the quadratures; its matrix coefficient solves

    dGamma = 2 Gamma L Gamma + (1/2) S L S,

with S the symplectic form.  The quantum Fisher information is Tr[L dGamma],
and the classical Fisher information of a Gaussian measurement with outcome
covariance Gt is (1/2) Tr[(Gt^-1 dGt)^2].
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .bath import Scenario
from .errors import DegenerateMeasurement, DomainError, SldSingular
from .gaussian import CovMatrix, momentum_block, position_block, symplectic_form

_RESIDUAL_TOL = 1e-10
_TRACE_FORM_TOL = 1e-9
_DEGENERATE_DIRECTION_TOL = 1e-14


@dataclass(frozen=True)
class SldQuadratic:
    """Coefficients of the SLD operator for a zero-mean Gaussian family.

    The linear coefficient vanishes identically because the displacement is
    zero along the whole family.
    """

    quadratic: NDArray[np.float64]
    constant: float

    @property
    def linear(self) -> NDArray[np.float64]:
        return np.zeros(self.quadratic.shape[0])

    def offblock_ratio(self) -> float:
        """Frobenius mass of inter-mode blocks over single-mode blocks.

        Diagnostic for how non-local the optimal measurement is; nothing is
        asserted about it.
        """
        n = self.quadratic.shape[0] // 2
        local = np.zeros_like(self.quadratic, dtype=bool)
        for k in range(n):
            local[2 * k:2 * k + 2, 2 * k:2 * k + 2] = True
        on = np.linalg.norm(self.quadratic[local])
        off = np.linalg.norm(self.quadratic[~local])
        return float(off / on) if on > 0 else float("inf")


@dataclass(frozen=True)
class FisherResult:
    """Thermometric figures of merit at one sweep point."""

    temperature: float
    scenario: Scenario
    n_probes: int
    qfi: float
    cfi_x: float
    cfi_p: float
    min_rel_error: float


class Measurement(enum.Enum):
    X = "x"
    P = "p"


def _as_array(gamma) -> NDArray[np.float64]:
    return gamma.data if isinstance(gamma, CovMatrix) else np.asarray(gamma, dtype=float)


def solve_sld(gamma, dgamma) -> SldQuadratic:
    """Solve the SLD matrix equation by vectorization.

    Returns a coefficient whose defining-equation residual is at most
    1e-10 relative to ||dgamma||; raises SldSingular otherwise.  A derivative
    below 1e-14 relative to ||gamma|| is treated as a stationary point and
    yields the zero operator.
    """
    g = _as_array(gamma)
    dg = np.asarray(dgamma, dtype=float)
    if g.shape != dg.shape:
        raise ValueError("gamma and dgamma must have matching shapes")
    dg = 0.5 * (dg + dg.T)
    dg_norm = np.linalg.norm(dg)
    if dg_norm < _DEGENERATE_DIRECTION_TOL * np.linalg.norm(g):
        return SldQuadratic(np.zeros_like(g), 0.0)
    s = symplectic_form(g.shape[0] // 2)
    system = 2.0 * np.kron(g, g) - 0.5 * np.kron(s, s)
    try:
        vec = np.linalg.solve(system, dg.reshape(-1))
    except np.linalg.LinAlgError:
        vec, *_ = np.linalg.lstsq(system, dg.reshape(-1), rcond=None)
    l2 = vec.reshape(g.shape)
    l2 = 0.5 * (l2 + l2.T)
    residual = np.linalg.norm(dg - 2.0 * g @ l2 @ g - 0.5 * s @ l2 @ s)
    if residual > _RESIDUAL_TOL * dg_norm:
        raise SldSingular(
            f"SLD residual {residual:.3e} exceeds {_RESIDUAL_TOL:.0e} * ||dgamma||"
        )
    return SldQuadratic(l2, -0.5 * float(np.sum(l2 * g)))


def sld_residual(gamma, dgamma, sld: SldQuadratic) -> float:
    """Norm of the defining-equation residual for a given SLD coefficient."""
    g = _as_array(gamma)
    dg = np.asarray(dgamma, dtype=float)
    s = symplectic_form(g.shape[0] // 2)
    l2 = sld.quadratic
    return float(np.linalg.norm(dg - 2.0 * g @ l2 @ g - 0.5 * s @ l2 @ s))


def qfi(gamma, dgamma, ddisp=None) -> float:
    """Quantum Fisher information of a Gaussian family.

    Both trace forms, Tr[L dGamma] and 2 Tr[L G L G + (1/4) L S L S], are
    evaluated and must agree to 1e-9 relative.  `ddisp` adds the displacement
    term dd^T Gamma^-1 dd for families with a moving mean.
    """
    g = _as_array(gamma)
    dg = np.asarray(dgamma, dtype=float)
    sld = solve_sld(g, dg)
    l2 = sld.quadratic
    f_direct = float(np.sum(l2 * dg))
    s = symplectic_form(g.shape[0] // 2)
    lg = l2 @ g
    ls = l2 @ s
    f_quad = 2.0 * float(np.trace(lg @ lg) + 0.25 * np.trace(ls @ ls))
    scale = max(abs(f_direct), abs(f_quad), 1e-300)
    if abs(f_direct - f_quad) > _TRACE_FORM_TOL * scale and scale > 1e-250:
        raise SldSingular(
            f"QFI trace forms disagree: {f_direct!r} vs {f_quad!r}"
        )
    value = f_direct
    if ddisp is not None:
        dd = np.asarray(ddisp, dtype=float)
        value += float(dd @ np.linalg.solve(g, dd))
    return max(value, 0.0)


def qfi_trace_forms(gamma, dgamma) -> tuple[float, float]:
    """Both QFI trace forms, for consistency checks."""
    g = _as_array(gamma)
    dg = np.asarray(dgamma, dtype=float)
    l2 = solve_sld(g, dg).quadratic
    s = symplectic_form(g.shape[0] // 2)
    lg = l2 @ g
    ls = l2 @ s
    return (
        float(np.sum(l2 * dg)),
        2.0 * float(np.trace(lg @ lg) + 0.25 * np.trace(ls @ ls)),
    )


def _classical_fisher(cov, dcov) -> float:
    try:
        ratio = np.linalg.solve(cov, dcov)
    except np.linalg.LinAlgError:
        raise DegenerateMeasurement("singular outcome covariance") from None
    return 0.5 * float(np.trace(ratio @ ratio))


def cfi_gaussian_measurement(gamma, dgamma, measurement) -> float:
    """Classical Fisher information of a Gaussian measurement.

    Measurement.X / Measurement.P take the exact infinite-squeezing limit of
    local quadrature detection: the trace formula on the N x N position or
    momentum blocks.  An explicit measurement covariance matrix evaluates the
    finite formula on Gamma + Gamma_meas.
    """
    g = _as_array(gamma)
    dg = np.asarray(dgamma, dtype=float)
    if measurement is Measurement.X:
        gm = CovMatrix(g.shape[0] // 2, g)
        dm = CovMatrix(g.shape[0] // 2, dg)
        return _classical_fisher(position_block(gm), position_block(dm))
    if measurement is Measurement.P:
        gm = CovMatrix(g.shape[0] // 2, g)
        dm = CovMatrix(g.shape[0] // 2, dg)
        return _classical_fisher(momentum_block(gm), momentum_block(dm))
    meas_cov = np.asarray(measurement, dtype=float)
    if meas_cov.shape != g.shape:
        raise DomainError("measurement covariance shape mismatch")
    return _classical_fisher(g + meas_cov, dg)


def quadrature_measurement_covariance(n_modes: int, squeezing: float,
                                      measurement: Measurement = Measurement.X):
    """Finite-squeezing covariance of local quadrature detection (cross-check path)."""
    if squeezing <= 0:
        raise DomainError("squeezing parameter must be positive")
    pair = (1.0 / squeezing, squeezing) if measurement is Measurement.X \
        else (squeezing, 1.0 / squeezing)
    return np.kron(np.eye(n_modes), np.diag(pair))


def min_relative_error(temperature: float, fisher: float, nu: int = 1) -> float:
    """Cramer-Rao floor on the relative temperature error, 1/(nu T sqrt(F))."""
    if fisher <= 0:
        raise DomainError("Fisher information must be positive")
    if nu < 1:
        raise DomainError("number of measurement runs must be a positive integer")
    return 1.0 / (nu * temperature * np.sqrt(fisher))


def fisher_point(solution, scenario, nu: int = 1) -> FisherResult:
    """Bundle QFI, local-measurement CFIs, and the error floor for one solve."""
    gamma = solution.covariance
    dgamma = solution.temperature_derivative
    value_q = qfi(gamma, dgamma)
    value_x = cfi_gaussian_measurement(gamma, dgamma, Measurement.X)
    value_p = cfi_gaussian_measurement(gamma, dgamma, Measurement.P)
    return FisherResult(
        temperature=solution.temperature,
        scenario=Scenario.parse(scenario),
        n_probes=gamma.n_modes,
        qfi=value_q,
        cfi_x=value_x,
        cfi_p=value_p,
        min_rel_error=min_relative_error(solution.temperature, value_q, nu),
    )
