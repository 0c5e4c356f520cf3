"""Brute-force cross-check: exact evolution of probes plus a discretized bath.

The continuum bath is replaced by a finite comb of oscillators.  Each
frequency on the grid carries a pair of counter-propagating plane-wave modes;
rotating each pair into standing-wave coordinates turns the position-momentum
coupling into a pure position-position network, so the closed system is
diagonalized once and propagated exactly.  The probe covariance block,
time-averaged after transients, approximates the steady state until the
recurrence time of the frequency comb.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .bath import BathSpec, ProbeChain, Scenario, effective_modes
from .errors import OracleConfigError
from .gaussian import CovMatrix

DEFAULT_SAMPLES = 160


@dataclass(frozen=True)
class DiscreteBath:
    """Frequency comb standing in for the continuum bath.

    ``frequencies`` and ``couplings`` describe the L = n_modes/2 distinct
    grid frequencies; each carries a +k/-k pair sharing the coupling, so both
    propagation directions exist.
    """

    frequencies: NDArray[np.float64]
    couplings: NDArray[np.float64]
    omega_max: float

    def __post_init__(self):
        w = np.asarray(self.frequencies, dtype=float)
        g = np.asarray(self.couplings, dtype=float)
        if w.ndim != 1 or w.shape != g.shape or len(w) < 1:
            raise OracleConfigError("frequencies/couplings must be matching 1-d arrays")
        if np.any(w <= 0):
            raise OracleConfigError("grid frequencies must be positive")
        w = w.copy()
        g = g.copy()
        w.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "frequencies", w)
        object.__setattr__(self, "couplings", g)

    @property
    def n_modes(self) -> int:
        return 2 * len(self.frequencies)

    @property
    def spacing(self) -> float:
        return self.omega_max / len(self.frequencies)

    @property
    def recurrence_time(self) -> float:
        return 2.0 * math.pi / self.spacing

    @classmethod
    def from_spectral_density(cls, bath: BathSpec, n_modes: int,
                              omega_max: float) -> "DiscreteBath":
        """Midpoint discretization of the diagonal spectral density."""
        if n_modes < 2 or n_modes % 2:
            raise OracleConfigError("n_modes must be a positive even integer")
        if omega_max <= 0:
            raise OracleConfigError("omega_max must be positive")
        half = n_modes // 2
        delta = omega_max / half
        freqs = (np.arange(half) + 0.5) * delta
        j_diag = bath.gamma2 * freqs * bath.cutoff**2 / (freqs**2 + bath.cutoff**2)
        couplings = np.sqrt(freqs * j_diag * delta / math.pi)
        return cls(freqs, couplings, omega_max)

    def zero_coupling(self) -> "DiscreteBath":
        return DiscreteBath(self.frequencies, np.zeros_like(self.couplings),
                            self.omega_max)


def thermal_bath_covariance(discrete: DiscreteBath, temperature: float):
    """Initial (position, momentum) variances of each grid frequency."""
    w = discrete.frequencies
    coth = 1.0 / np.tanh(w / (2.0 * temperature))
    return coth / (2.0 * w), w * coth / 2.0


def _ground_state_blocks(masses, stiffness):
    """Position/momentum covariance blocks of the ground state of a network."""
    m_isqrt = np.diag(1.0 / np.sqrt(masses))
    m_sqrt = np.diag(np.sqrt(masses))
    wmat = m_isqrt @ stiffness @ m_isqrt
    lam, u = np.linalg.eigh(wmat)
    if lam.min() <= 0:
        raise OracleConfigError("probe Hamiltonian is not positive definite")
    root = u @ np.diag(lam**0.25) @ u.T
    inv_root = u @ np.diag(lam**-0.25) @ u.T
    return 0.5 * m_isqrt @ inv_root @ inv_root @ m_isqrt, \
        0.5 * m_sqrt @ root @ root @ m_sqrt


def _counter_term(discrete: DiscreteBath, delays):
    """Discrete-sum counter-term matching the comb's static bath shift."""
    w = discrete.frequencies
    g2 = discrete.couplings**2
    phases = np.cos(np.multiply.outer(delays, w))  # (N, N, L)
    return phases @ (2.0 * g2 / w**2)


def _closed_system(probes: ProbeChain, bath: BathSpec, discrete: DiscreteBath,
                   renormalization: bool):
    """Stiffness and mass of the probe + standing-wave-bath position network."""
    n = probes.n
    freqs = discrete.frequencies
    half = len(freqs)
    positions = probes.spacing * np.arange(n)  # delays double as coordinates (c = 1)
    k_probe = probes.bare_coupling_matrix()
    if renormalization:
        k_probe = k_probe + _counter_term(discrete, probes.delay_matrix())
    dim = n + discrete.n_modes
    stiffness = np.zeros((dim, dim))
    stiffness[:n, :n] = k_probe
    phase = np.multiply.outer(positions, freqs)  # wavenumber k = w (c = 1)
    coupling = np.empty((n, discrete.n_modes))
    coupling[:, 0::2] = math.sqrt(2.0) * discrete.couplings * np.cos(phase)
    coupling[:, 1::2] = math.sqrt(2.0) * discrete.couplings * np.sin(phase)
    stiffness[:n, n:] = coupling
    stiffness[n:, :n] = coupling.T
    bath_diag = np.repeat(freqs**2, 2)
    stiffness[n:, n:] = np.diag(bath_diag)
    masses = np.concatenate([probes.masses, np.ones(discrete.n_modes)])
    return stiffness, masses


def _dressed_ground_blocks(probes: ProbeChain, bath: BathSpec,
                           renormalization: bool):
    """Vacuum of the self-consistently dressed probe modes.

    Built from the closed-form dressed-mode frequencies, so slow collective
    modes start at their stationary width instead of ringing through the
    whole pre-recurrence window.
    """
    freqs, vecs, _ = effective_modes(bath, probes, renormalization)
    if len(freqs) != probes.n:
        raise OracleConfigError("could not resolve one dressed mode per probe")
    k_tilde = vecs @ np.diag(freqs**2) @ np.linalg.inv(vecs)
    k_tilde = 0.5 * (k_tilde + k_tilde.T)
    lam, u = np.linalg.eigh(k_tilde)
    if lam.min() <= 0:
        raise OracleConfigError("dressed probe stiffness not positive definite")
    x_w = 0.5 * u @ np.diag(lam**-0.5) @ u.T
    p_w = 0.5 * u @ np.diag(lam**0.5) @ u.T
    m_isqrt = np.diag(1.0 / np.sqrt(probes.masses))
    m_sqrt = np.diag(np.sqrt(probes.masses))
    return m_isqrt @ x_w @ m_isqrt, m_sqrt @ p_w @ m_sqrt


def _initial_blocks(probes, bath, discrete, temperature, renormalization):
    """Probe Gaussian start plus product-thermal comb.

    Slowly damped collective probe modes must start close to their dressed
    stationary width or they keep ringing past the comb recurrence, so the
    probes start in the dressed-mode vacuum; strongly damped directions
    forget this choice and re-equilibrate, which is what the cross-check
    exercises.  A decoupled comb keeps the bare (counter-term) ground state.
    """
    n = probes.n
    if np.any(discrete.couplings):
        try:
            xq, pq = _dressed_ground_blocks(probes, bath, renormalization)
        except OracleConfigError:
            xq = pq = None
    else:
        xq = pq = None
    if xq is None:
        k_probe = probes.bare_coupling_matrix()
        if renormalization:
            k_probe = k_probe + _counter_term(discrete, probes.delay_matrix())
        xq, pq = _ground_state_blocks(probes.masses, k_probe)
    y_var, q_var = thermal_bath_covariance(discrete, temperature)
    dim = n + discrete.n_modes
    z_block = np.zeros((dim, dim))
    pi_block = np.zeros((dim, dim))
    z_block[:n, :n] = xq
    pi_block[:n, :n] = pq
    z_block[n:, n:] = np.diag(np.repeat(y_var, 2))
    pi_block[n:, n:] = np.diag(np.repeat(q_var, 2))
    return z_block, pi_block


class _Propagator:
    """Exact normal-mode propagator of the closed quadratic network."""

    def __init__(self, probes, bath, discrete, temperature, renormalization):
        stiffness, masses = _closed_system(probes, bath, discrete, renormalization)
        m_sqrt = np.sqrt(masses)
        wmat = stiffness / np.outer(m_sqrt, m_sqrt)
        lam, u = np.linalg.eigh(wmat)
        if lam.min() <= 1e-12 * lam.max():
            raise OracleConfigError("closed system has a (near-)zero normal mode")
        self.freqs = np.sqrt(lam)
        self.n = probes.n
        self.into_xi = u.T * m_sqrt[None, :]          # z0  -> normal positions
        self.into_eta = u.T / m_sqrt[None, :]         # pi0 -> normal momenta
        self.rows_x = (u / m_sqrt[:, None])[: self.n]  # normal positions -> probe x
        self.rows_p = (u * m_sqrt[:, None])[: self.n]  # normal momenta  -> probe p
        self.z0, self.pi0 = _initial_blocks(
            probes, bath, discrete, temperature, renormalization
        )

    def probe_covariance(self, t: float) -> NDArray[np.float64]:
        """Probe-block covariance at time t, interleaved ordering."""
        c = np.cos(self.freqs * t)
        s = np.sin(self.freqs * t)
        mx_z = (self.rows_x * c[None, :]) @ self.into_xi
        mx_pi = (self.rows_x * (s / self.freqs)[None, :]) @ self.into_eta
        mp_z = (self.rows_p * (-self.freqs * s)[None, :]) @ self.into_xi
        mp_pi = (self.rows_p * c[None, :]) @ self.into_eta
        xx = mx_z @ self.z0 @ mx_z.T + mx_pi @ self.pi0 @ mx_pi.T
        pp = mp_z @ self.z0 @ mp_z.T + mp_pi @ self.pi0 @ mp_pi.T
        xp = mx_z @ self.z0 @ mp_z.T + mx_pi @ self.pi0 @ mp_pi.T
        out = np.zeros((2 * self.n, 2 * self.n))
        out[0::2, 0::2] = xx
        out[1::2, 1::2] = pp
        out[0::2, 1::2] = xp
        out[1::2, 0::2] = xp.T
        return out

    def full_covariance(self, t: float) -> NDArray[np.float64]:
        """Whole-system covariance in (positions, momenta) block ordering."""
        c = np.cos(self.freqs * t)
        s = np.sin(self.freqs * t)
        z_from_xi = self.into_eta.T   # M^{-1/2} U, exact inverse of into_xi
        pi_from_eta = self.into_xi.T  # M^{1/2} U
        mzz = z_from_xi @ (c[:, None] * self.into_xi)
        mzp = z_from_xi @ ((s / self.freqs)[:, None] * self.into_eta)
        mpz = pi_from_eta @ ((-self.freqs * s)[:, None] * self.into_xi)
        mpp = pi_from_eta @ (c[:, None] * self.into_eta)
        emat = np.block([[mzz, mzp], [mpz, mpp]])
        gamma0 = np.block([
            [self.z0, np.zeros_like(self.z0)],
            [np.zeros_like(self.pi0), self.pi0],
        ])
        return emat @ gamma0 @ emat.T


def _check_window(discrete, t_final, window):
    if t_final <= 0 or window <= 0:
        raise OracleConfigError("t_final and window must be positive")
    if t_final + window >= discrete.recurrence_time:
        raise OracleConfigError(
            f"t_final + window = {t_final + window:g} reaches the recurrence "
            f"time {discrete.recurrence_time:g}; increase the mode count"
        )


def evolve_covariance(probes: ProbeChain, bath: BathSpec, discrete: DiscreteBath,
                      temperature: float, t_final: float, window: float,
                      n_samples: int = DEFAULT_SAMPLES,
                      renormalization: bool = True) -> CovMatrix:
    """Time-averaged probe covariance of the exactly evolved closed system."""
    _check_window(discrete, t_final, window)
    if bath.scenario is Scenario.INDEPENDENT:
        if np.any(probes.couplings):
            raise OracleConfigError(
                "independent-bath oracle requires zero direct couplings"
            )
        return _evolve_independent(probes, bath, discrete, temperature,
                                   t_final, window, n_samples, renormalization)
    prop = _Propagator(probes, bath, discrete, temperature, renormalization)
    times = np.linspace(t_final, t_final + window, n_samples)
    acc = np.zeros((2 * probes.n, 2 * probes.n))
    for t in times:
        acc += prop.probe_covariance(t)
    return CovMatrix(probes.n, acc / n_samples)


def _evolve_independent(probes, bath, discrete, temperature, t_final, window,
                        n_samples, renormalization):
    """Independent baths: each probe sees a private copy of the same comb."""
    cache = {}
    blocks = []
    for i in range(probes.n):
        key = (float(probes.masses[i]), float(probes.frequencies[i]))
        if key not in cache:
            single = ProbeChain.chain(1, omega0=key[1], mass=key[0])
            sub_bath = BathSpec(bath.gamma2, bath.cutoff, np.zeros((1, 1)),
                                Scenario.COMMON)
            cache[key] = evolve_covariance(single, sub_bath, discrete, temperature,
                                           t_final, window, n_samples,
                                           renormalization).data
        blocks.append(cache[key])
    out = np.zeros((2 * probes.n, 2 * probes.n))
    for i, blk in enumerate(blocks):
        out[2 * i:2 * i + 2, 2 * i:2 * i + 2] = blk
    return CovMatrix(probes.n, out)


def probe_trace_series(probes, bath, discrete, temperature, times,
                       renormalization: bool = True):
    """Trace of the probe covariance at each time; settling diagnostic."""
    prop = _Propagator(probes, bath, discrete, temperature, renormalization)
    return np.array([np.trace(prop.probe_covariance(t)) for t in times])


def full_covariance_at(probes, bath, discrete, temperature, t,
                       renormalization: bool = True):
    """Whole-system covariance at one time; test support for small combs."""
    prop = _Propagator(probes, bath, discrete, temperature, renormalization)
    return prop.full_covariance(t)
