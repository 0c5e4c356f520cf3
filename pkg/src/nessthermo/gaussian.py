"""Covariance-matrix algebra for zero-mean N-mode Gaussian states.

Conventions: hbar = k_B = 1, quadratures interleaved as (x1, p1, ..., xN, pN),
vacuum symplectic eigenvalue 1/2, so physical states satisfy
``gamma + (i/2) * symplectic_form >= 0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import DegenerateState, InvalidPartition

VACUUM_EIGENVALUE = 0.5
PAIRING_TOL = 1e-9
PHYSICALITY_TOL = 1e-9


def symplectic_form(n_modes: int) -> NDArray[np.float64]:
    """Block-diagonal symplectic form, one [[0, 1], [-1, 0]] block per mode."""
    s = np.zeros((2 * n_modes, 2 * n_modes))
    for k in range(n_modes):
        s[2 * k, 2 * k + 1] = 1.0
        s[2 * k + 1, 2 * k] = -1.0
    return s


@dataclass(frozen=True)
class CovMatrix:
    """Real symmetric 2N x 2N second-moment matrix of a zero-mean Gaussian state."""

    n_modes: int
    data: NDArray[np.float64]

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("n_modes must be a positive integer")
        arr = np.asarray(self.data, dtype=float)
        dim = 2 * self.n_modes
        if arr.shape != (dim, dim):
            raise ValueError(f"expected shape {(dim, dim)}, got {arr.shape}")
        arr = 0.5 * (arr + arr.T)  # stored exactly symmetric
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_blocks(cls, xx, pp, xp=None) -> "CovMatrix":
        """Assemble from N x N position/momentum blocks (xp defaults to zero)."""
        xx = np.asarray(xx, dtype=float)
        n = xx.shape[0]
        g = np.zeros((2 * n, 2 * n))
        g[0::2, 0::2] = xx
        g[1::2, 1::2] = pp
        if xp is not None:
            g[0::2, 1::2] = xp
            g[1::2, 0::2] = np.asarray(xp).T
        return cls(n, g)

    @classmethod
    def vacuum(cls, n_modes: int) -> "CovMatrix":
        return cls(n_modes, VACUUM_EIGENVALUE * np.eye(2 * n_modes))

    @classmethod
    def thermal(cls, frequencies, temperature, masses=None) -> "CovMatrix":
        """Product of single-mode thermal states at the given temperature."""
        w = np.atleast_1d(np.asarray(frequencies, dtype=float))
        m = np.ones_like(w) if masses is None else np.atleast_1d(np.asarray(masses, float))
        coth = 1.0 / np.tanh(w / (2.0 * temperature))
        return cls.from_blocks(np.diag(coth / (2.0 * m * w)), np.diag(m * w * coth / 2.0))

    def mode_subset(self, modes) -> "CovMatrix":
        """Reduced state on the given modes (indices sorted, 0-based)."""
        modes = sorted(modes)
        idx = np.array([2 * k + o for k in modes for o in (0, 1)])
        return CovMatrix(len(modes), self.data[np.ix_(idx, idx)])


def _check_positive_definite(g: NDArray[np.float64]) -> None:
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise DegenerateState("covariance matrix is not positive definite") from None


def symplectic_eigenvalues(g: CovMatrix) -> NDArray[np.float64]:
    """Williamson spectrum of a positive-definite covariance matrix, descending.

    Computed as the paired absolute eigenvalues of i * symplectic_form * g.
    """
    _check_positive_definite(g.data)
    return _symplectic_spectrum(g.data)


def _symplectic_spectrum(data: NDArray[np.float64]) -> NDArray[np.float64]:
    n = data.shape[0] // 2
    ev = np.linalg.eigvals(1j * symplectic_form(n) @ data)
    mags = np.sort(np.abs(ev))[::-1]
    pairs = mags.reshape(n, 2)
    gap = np.abs(pairs[:, 0] - pairs[:, 1])
    if np.any(gap > PAIRING_TOL * np.maximum(1.0, pairs[:, 0])):
        raise DegenerateState("symplectic eigenvalues of i*S*g failed to pair up")
    return pairs.mean(axis=1)


def min_symplectic_eigenvalue(g: CovMatrix) -> float:
    return float(symplectic_eigenvalues(g)[-1])


def is_physical(g: CovMatrix, tol: float = PHYSICALITY_TOL) -> bool:
    """True when every symplectic eigenvalue is at least 1/2 - tol."""
    try:
        return min_symplectic_eigenvalue(g) >= VACUUM_EIGENVALUE - tol
    except DegenerateState:
        return False


def _validate_partition(n_modes: int, partition) -> frozenset:
    part = frozenset(int(k) for k in partition)
    if not part or len(part) >= n_modes:
        raise InvalidPartition("partition must be a nonempty proper subset of modes")
    if any(k < 0 or k >= n_modes for k in part):
        raise InvalidPartition(f"mode index out of range for {n_modes} modes")
    return part


def partial_transpose(g: CovMatrix, partition) -> CovMatrix:
    """Sign-flip momenta of the partition's modes (an involution)."""
    part = _validate_partition(g.n_modes, partition)
    flip = np.ones(2 * g.n_modes)
    for k in part:
        flip[2 * k + 1] = -1.0
    return CovMatrix(g.n_modes, g.data * np.outer(flip, flip))


def log_negativity(g: CovMatrix, partition) -> float:
    """Logarithmic negativity across the bipartition, natural logarithm."""
    nu_t = symplectic_eigenvalues(partial_transpose(g, partition))
    return float(np.sum(np.maximum(0.0, -np.log(2.0 * nu_t))))


def bosonic_entropy(nu) -> NDArray[np.float64]:
    """Entropy contribution f(nu) of one symplectic eigenvalue; f(1/2) = 0."""
    nu = np.asarray(nu, dtype=float)
    up = nu + 0.5
    dn = np.maximum(nu - 0.5, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        term = np.where(dn > 0.0, dn * np.log(np.where(dn > 0.0, dn, 1.0)), 0.0)
    return up * np.log(up) - term


def entropy(g: CovMatrix) -> float:
    """Von Neumann entropy in nats."""
    return float(np.sum(bosonic_entropy(symplectic_eigenvalues(g))))


def mutual_information(g: CovMatrix, partition) -> float:
    """S(A) + S(B) - S(AB) for the bipartition defined by `partition`."""
    part = _validate_partition(g.n_modes, partition)
    rest = sorted(set(range(g.n_modes)) - part)
    return entropy(g.mode_subset(part)) + entropy(g.mode_subset(rest)) - entropy(g)


def position_block(g: CovMatrix) -> NDArray[np.float64]:
    """N x N block of position-position covariances."""
    return np.array(g.data[0::2, 0::2])


def momentum_block(g: CovMatrix) -> NDArray[np.float64]:
    """N x N block of momentum-momentum covariances."""
    return np.array(g.data[1::2, 1::2])


def random_symplectic(n_modes: int, rng, scale: float = 1.0) -> NDArray[np.float64]:
    """Random symplectic matrix exp(S*H) with H symmetric; test helper."""
    from scipy.linalg import expm

    h = rng.normal(size=(2 * n_modes, 2 * n_modes), scale=scale)
    h = 0.5 * (h + h.T)
    return expm(symplectic_form(n_modes) @ h)
