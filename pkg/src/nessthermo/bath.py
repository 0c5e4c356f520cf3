"""Closed-form bath kernels for an Ohmic bath with Lorentzian cutoff.

The bath is one-dimensional with linear dispersion, so a probe pair at
distance r interacts through the retardation delay a = r / c.  Working in
units of the reference probe frequency, delays are stored directly as the
matrix ``a_ij``; the sound speed never appears on its own.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.typing import NDArray

from .errors import DomainError


class Scenario(enum.Enum):
    """Probe-bath geometry: one private bath per probe, or a single shared bath."""

    INDEPENDENT = "a"
    COMMON = "b"

    @classmethod
    def parse(cls, label) -> "Scenario":
        if isinstance(label, cls):
            return label
        try:
            return cls(str(label).strip().lower())
        except ValueError:
            raise DomainError(f"unknown scenario {label!r}; expected 'a' or 'b'") from None


@dataclass(frozen=True)
class ProbeChain:
    """N harmonic probes on an equally spaced line.

    ``couplings`` holds direct spring constants g_ij with zero diagonal; the
    diagonal m_i w_i^2 is formed internally where needed.  ``spacing`` is the
    nearest-neighbour retardation delay a, so a_ij = |i - j| * a.
    """

    n: int
    masses: NDArray[np.float64]
    frequencies: NDArray[np.float64]
    couplings: NDArray[np.float64]
    spacing: float

    def __post_init__(self):
        m = np.atleast_1d(np.asarray(self.masses, dtype=float))
        w = np.atleast_1d(np.asarray(self.frequencies, dtype=float))
        g = np.asarray(self.couplings, dtype=float)
        if self.n < 1:
            raise ValueError("need at least one probe")
        if m.shape != (self.n,) or w.shape != (self.n,):
            raise ValueError("masses/frequencies must have length n")
        if np.any(m <= 0) or np.any(w <= 0):
            raise ValueError("masses and frequencies must be positive")
        if g.shape != (self.n, self.n) or not np.allclose(g, g.T):
            raise ValueError("couplings must be a symmetric n x n matrix")
        if np.any(np.diag(g) != 0.0):
            raise ValueError("couplings must have zero diagonal")
        if self.spacing < 0:
            raise ValueError("spacing must be nonnegative")
        m.setflags(write=False)
        w.setflags(write=False)
        g = g.copy()
        g.setflags(write=False)
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "frequencies", w)
        object.__setattr__(self, "couplings", g)

    @classmethod
    def chain(cls, n: int, omega0: float = 1.0, mass: float = 1.0,
              spacing: float = 0.1, couplings=None) -> "ProbeChain":
        g = np.zeros((n, n)) if couplings is None else couplings
        return cls(n, np.full(n, float(mass)), np.full(n, float(omega0)), g, spacing)

    def delay_matrix(self) -> NDArray[np.float64]:
        idx = np.arange(self.n)
        return self.spacing * np.abs(np.subtract.outer(idx, idx)).astype(float)

    def bare_coupling_matrix(self) -> NDArray[np.float64]:
        """couplings with the diagonal set to m_i w_i^2."""
        return self.couplings + np.diag(self.masses * self.frequencies**2)


@dataclass(frozen=True)
class BathSpec:
    """Ohmic bath with Lorentzian cutoff and retardation delays between probes.

    J_ii(w) = gamma2 * w * cutoff^2 / (w^2 + cutoff^2); off-diagonal entries
    carry the factor cos(w * a_ij) in the common-bath scenario and vanish for
    independent baths.
    """

    gamma2: float
    cutoff: float
    delays: NDArray[np.float64]
    scenario: Scenario = Scenario.COMMON

    def __post_init__(self):
        if self.gamma2 <= 0 or self.cutoff <= 0:
            raise ValueError("gamma2 and cutoff must be positive")
        a = np.asarray(self.delays, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("delays must be a square matrix")
        if np.any(a < 0) or np.any(np.diag(a) != 0.0) or not np.allclose(a, a.T):
            raise ValueError("delays must be symmetric, nonnegative, zero on the diagonal")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "delays", a)
        object.__setattr__(self, "scenario", Scenario.parse(self.scenario))

    @classmethod
    def for_chain(cls, probes: ProbeChain, gamma2: float, cutoff: float,
                  scenario=Scenario.COMMON) -> "BathSpec":
        return cls(gamma2, cutoff, probes.delay_matrix(), Scenario.parse(scenario))

    @property
    def n(self) -> int:
        return self.delays.shape[0]

    def single_probe(self) -> "BathSpec":
        return replace(self, delays=np.zeros((1, 1)))

    def _offdiag_mask(self) -> NDArray[np.float64]:
        """1 everywhere for a common bath, identity for independent baths."""
        if self.scenario is Scenario.COMMON:
            return np.ones((self.n, self.n))
        return np.eye(self.n)


def lorentzian(bath: BathSpec, omega) -> NDArray[np.float64]:
    """Cutoff factor gamma2 * cutoff^2 / (omega^2 + cutoff^2)."""
    w = np.asarray(omega, dtype=float)
    return bath.gamma2 * bath.cutoff**2 / (w**2 + bath.cutoff**2)


def spectral_density(bath: BathSpec, omega: float) -> NDArray[np.float64]:
    """Spectral-density matrix J(omega) for omega > 0."""
    if np.any(np.asarray(omega) <= 0):
        raise DomainError("spectral density is defined for omega > 0")
    return spectral_density_over_omega(bath, omega) * omega


def spectral_density_over_omega(bath: BathSpec, omega) -> NDArray[np.float64]:
    """J(omega)/omega, finite down to omega = 0; accepts scalar or (K,) input."""
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    out = (lorentzian(bath, w)[:, None, None]
           * np.cos(w[:, None, None] * bath.delays[None])
           * bath._offdiag_mask()[None])
    return out[0] if np.isscalar(omega) or np.ndim(omega) == 0 else out


def susceptibility(bath: BathSpec, omega: float) -> NDArray[np.complex128]:
    """Frequency-domain dissipation kernel, valid for all real omega."""
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    out = susceptibility_batch(bath, w)
    return out[0] if np.isscalar(omega) or np.ndim(omega) == 0 else out


def susceptibility_batch(bath: BathSpec, omegas: NDArray[np.float64]) -> NDArray[np.complex128]:
    a = bath.delays
    static = bath.cutoff * np.exp(-bath.cutoff * a)
    phase = np.exp(1j * omegas[:, None, None] * a[None])
    kernel = static[None] + 1j * omegas[:, None, None] * phase
    return lorentzian(bath, omegas)[:, None, None] * kernel * bath._offdiag_mask()[None]


def renormalized_couplings(bath: BathSpec, probes: ProbeChain) -> NDArray[np.float64]:
    """Coupling matrix with the bath counter-term absorbed.

    The shift gamma2 * cutoff * exp(-cutoff * a_ij) cancels the static
    potential induced by the bath; independent baths keep only the local
    (diagonal) counter-term.
    """
    shift = bath.gamma2 * bath.cutoff * np.exp(-bath.cutoff * bath.delays)
    return probes.bare_coupling_matrix() + shift * bath._offdiag_mask()


def alpha_matrix(bath: BathSpec, probes: ProbeChain, omega: float,
                 renormalized: bool = True) -> NDArray[np.complex128]:
    """Frequency-domain response matrix whose inverse maps force to position."""
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    out = alpha_batch(bath, probes, w, renormalized)
    return out[0] if np.isscalar(omega) or np.ndim(omega) == 0 else out


def alpha_batch(bath: BathSpec, probes: ProbeChain, omegas: NDArray[np.float64],
                renormalized: bool = True) -> NDArray[np.complex128]:
    if renormalized:
        gmat = renormalized_couplings(bath, probes)
    else:
        gmat = probes.bare_coupling_matrix()
    inertia = np.diag(probes.masses)[None] * (omegas**2)[:, None, None]
    return gmat[None] - inertia - susceptibility_batch(bath, omegas)


def effective_stiffness_batch(bath: BathSpec, probes: ProbeChain,
                              omegas, renormalized: bool = True):
    """Mass-weighted Re(alpha) + m w^2, i.e. the dressed stiffness at each w."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    if renormalized:
        gmat = renormalized_couplings(bath, probes)
    else:
        gmat = probes.bare_coupling_matrix()
    m_isqrt = 1.0 / np.sqrt(probes.masses)
    weight = np.outer(m_isqrt, m_isqrt)
    re_chi = susceptibility_batch(bath, omegas).real
    return (gmat[None] - re_chi) * weight[None]


def effective_modes(bath: BathSpec, probes: ProbeChain,
                    renormalized: bool = True, grid_points: int = 1200):
    """Self-consistent dressed normal modes of the probe chain.

    Each sorted eigenvalue branch of the mass-weighted dressed stiffness is
    continuous in frequency; its crossing with w^2 locates one collective
    mode.  Returns (frequencies, mass-weighted eigenvectors, half-widths);
    the half-width is the mode's bath damping, which can be orders of
    magnitude below the single-probe value for nearly dark modes.
    """
    from scipy.optimize import brentq

    bare = np.sqrt(probes.frequencies**2
                   + (bath.gamma2 * bath.cutoff / probes.masses if renormalized else 0.0))
    lo = 0.01 * float(probes.frequencies.min())
    hi = 3.0 * float(bare.max())
    grid = np.linspace(lo, hi, grid_points)
    lam_grid = np.linalg.eigvalsh(
        effective_stiffness_batch(bath, probes, grid, renormalized))
    h_grid = lam_grid - (grid**2)[:, None]
    m_isqrt = 1.0 / np.sqrt(probes.masses)
    weight = np.outer(m_isqrt, m_isqrt)
    freqs, vecs, widths = [], [], []
    for k in range(probes.n):
        h_k = h_grid[:, k]
        for idx in np.nonzero(h_k[:-1] * h_k[1:] < 0)[0]:
            def branch(w, kk=k):
                stiff = effective_stiffness_batch(bath, probes, w, renormalized)[0]
                return np.linalg.eigvalsh(stiff)[kk] - w * w

            w_k = brentq(branch, grid[idx], grid[idx + 1], xtol=1e-14, rtol=1e-14)
            stiff = effective_stiffness_batch(bath, probes, w_k, renormalized)[0]
            _, evecs = np.linalg.eigh(stiff)
            vec = evecs[:, k]
            j_weighted = spectral_density(bath, w_k) * weight
            freqs.append(w_k)
            vecs.append(vec)
            widths.append(abs(vec @ j_weighted @ vec) / (2.0 * w_k))
    return np.array(freqs), np.array(vecs).T, np.array(widths)
