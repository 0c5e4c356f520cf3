"""Steady-state covariance of probe chains by frequency-domain quadrature.

The stationary second moments follow from the frequency-domain response: with
alpha(w) the response matrix and J(w) the spectral density, the position
spectrum is coth(w/2T) * Im[alpha(w)^-1] (a real symmetric matrix, since
Im alpha = -J exactly), and

    <x_i x_j>   = (1/pi) * integral_0^inf coth(w/2T) Im[alpha^-1]_ij dw
    <p_i p_j>   = (m_i m_j/pi) * integral_0^inf w^2 coth(w/2T) Im[alpha^-1]_ij dw

The x-p cross blocks vanish identically (odd integrand).  The temperature
derivative replaces coth(w/2T) by w/(2 T^2 sinh^2(w/2T)).  Integrands are
evaluated through J(w)/w, which is finite down to w = 0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import quad as _scipy_quad
from scipy.optimize import brentq

from .bath import BathSpec, ProbeChain, Scenario, lorentzian, renormalized_couplings
from .errors import DomainError, UnstableModel
from .gaussian import CovMatrix, momentum_block, position_block
from .quadrature import adaptive_integrate

_OSC_PANEL_BUDGET = 2048  # initial-grid cap for long-delay oscillatory kernels


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and truncation policy for the covariance integrals."""

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    omega_max_mult: float = 20.0
    max_subdivisions: int = 100_000
    max_doublings: int = 6

    def __post_init__(self):
        if min(self.rel_tol, self.abs_tol, self.omega_max_mult) <= 0:
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 4:
            raise ValueError("max_subdivisions too small")


@dataclass(frozen=True)
class NessProblem:
    """A probe chain, its bath, and the target temperature."""

    bath: BathSpec
    probes: ProbeChain
    temperature: float
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    renormalization: bool = True

    def __post_init__(self):
        if self.temperature <= 0:
            raise DomainError("temperature must be positive")
        if self.bath.n != self.probes.n:
            raise ValueError("bath delay matrix and probe count disagree")


@dataclass(frozen=True)
class NessSolution:
    temperature: float
    covariance: CovMatrix
    temperature_derivative: NDArray[np.float64] | None
    error_estimate: float


class CorrelationKind(enum.Enum):
    XX = "xx"
    PP = "pp"


# ---------------------------------------------------------------------------
# thermal weights


def _coth_weight(omega, temperature):
    """w * coth(w / 2T); equals 2T at w = 0."""
    x = omega / (2.0 * temperature)
    out = np.empty_like(omega)
    small = x < 1e-4
    xs = x[small]
    out[small] = 2.0 * temperature * (1.0 + xs * xs / 3.0 - xs**4 / 45.0)
    out[~small] = omega[~small] / np.tanh(x[~small])
    return out


def _dcoth_weight(omega, temperature):
    """w * d/dT coth(w / 2T) = 2 x^2 / sinh(x)^2 with x = w / 2T."""
    x = omega / (2.0 * temperature)
    out = np.zeros_like(omega)
    small = x < 1e-4
    out[small] = 2.0 - 2.0 * x[small] ** 2 / 3.0
    mid = (~small) & (x < 350.0)
    out[mid] = 2.0 * (x[mid] / np.sinh(x[mid])) ** 2
    return out


# ---------------------------------------------------------------------------
# integrand


def _coupling_matrix(bath, probes, renormalization):
    if renormalization:
        return renormalized_couplings(bath, probes)
    return probes.bare_coupling_matrix()


def _check_static_stability(bath, probes, renormalization):
    gmat = _coupling_matrix(bath, probes, renormalization)
    chi0 = bath.gamma2 * bath.cutoff * np.exp(-bath.cutoff * bath.delays)
    alpha0 = gmat - chi0 * bath._offdiag_mask()
    if np.linalg.eigvalsh(alpha0).min() <= 0:
        raise UnstableModel(
            "static response matrix is not positive definite; no steady state"
        )


def _make_integrand(bath, probes, temps, renormalization, with_derivative):
    """Vectorized integrand over packed upper-triangle components.

    Layout per temperature: [xx, pp] or [xx, pp, dxx, dpp] blocks of
    N(N+1)/2 entries each; returns (component builder, group ids, unpacker).
    """
    n = probes.n
    iu0, iu1 = np.triu_indices(n)
    n_tri = len(iu0)
    masses = probes.masses
    m2 = masses[iu0] * masses[iu1]
    gmat = _coupling_matrix(bath, probes, renormalization)
    delays = bath.delays
    mask = bath._offdiag_mask()
    static = bath.cutoff * np.exp(-bath.cutoff * delays) * mask
    n_fam = 4 if with_derivative else 2
    # a chain has only O(N) distinct delays: build cos/sin on those and expand
    dist_values, dist_idx = np.unique(delays, return_inverse=True)
    dist_idx = dist_idx.reshape(n, n)

    def kernel(omegas):
        lor = lorentzian(bath, omegas)
        phases = omegas[:, None] * dist_values[None, :]
        cosm = np.cos(phases)[:, dist_idx] * mask[None]
        sinm = np.sin(phases)[:, dist_idx] * mask[None]
        w3 = omegas[:, None, None]
        lor3 = lor[:, None, None]
        # chi = lor * (static + i w e^{i w a}) with e^{iwa} = cos + i sin,
        # so Re chi = lor (static - w sin) and Im chi = w * J/w.
        jred = lor3 * cosm
        alpha = np.empty((len(omegas), n, n), dtype=complex)
        alpha.real = gmat[None] - lor3 * (static[None] - w3 * sinm)
        alpha.real[:, np.arange(n), np.arange(n)] -= masses[None, :] * (omegas**2)[:, None]
        alpha.imag = -w3 * jred
        ainv = np.linalg.inv(alpha)
        # Re[A (J/w) A^H] through real matmuls: B = A_re J, C = A_im J
        sandwich = (ainv.real @ jred) @ ainv.real.transpose(0, 2, 1) \
            + (ainv.imag @ jred) @ ainv.imag.transpose(0, 2, 1)
        return sandwich[:, iu0, iu1]  # (K, n_tri), real symmetric kernel

    def f(omegas):
        wred = kernel(omegas)
        out = np.empty((len(omegas), n_fam * n_tri * len(temps)))
        w2 = omegas**2
        for ti, temp in enumerate(temps):
            c0 = _coth_weight(omegas, temp) / math.pi
            base = ti * n_fam * n_tri
            out[:, base:base + n_tri] = c0[:, None] * wred
            out[:, base + n_tri:base + 2 * n_tri] = (w2 * c0)[:, None] * wred * m2[None]
            if with_derivative:
                c1 = _dcoth_weight(omegas, temp) / math.pi
                out[:, base + 2 * n_tri:base + 3 * n_tri] = c1[:, None] * wred
                out[:, base + 3 * n_tri:base + 4 * n_tri] = (
                    (w2 * c1)[:, None] * wred * m2[None]
                )
        return out

    def f_minus_asymptote(omegas):
        """f with the large-omega behaviour removed (extension segments).

        Subtracting coth -> 1 times the leading 1/omega expansion of the
        kernel leaves an integrand whose oscillatory part sits below the
        solve tolerance, so the analytic tail handles the oscillations and
        the quadrature only sees a smooth, rapidly decaying difference.
        """
        out = f(omegas)
        lor = lorentzian(bath, omegas)
        phases = omegas[:, None] * dist_values[None, :]
        cosm = np.cos(phases)[:, dist_idx] * mask[None]
        jred_packed = (lor[:, None, None] * cosm)[:, iu0, iu1]
        inv_w3 = 1.0 / (math.pi * omegas**3)
        xx_asym = jred_packed * inv_w3[:, None] / m2[None]
        pp_asym = jred_packed / (math.pi * omegas)[:, None]
        for ti in range(len(temps)):
            base = ti * n_fam * n_tri
            out[:, base:base + n_tri] -= xx_asym
            out[:, base + n_tri:base + 2 * n_tri] -= pp_asym
        return out

    groups = np.repeat(np.arange(n_fam * len(temps)), n_tri)

    def unpack(packed):
        full = np.zeros((n, n))
        full[iu0, iu1] = packed
        full[iu1, iu0] = packed
        return full

    return f, f_minus_asymptote, groups, unpack, n_tri, n_fam


# ---------------------------------------------------------------------------
# breakpoints


def _resonances(bath, probes, renormalization, hi):
    """Resonance positions and half-widths, including collective modes.

    Scans each distinct single-probe root of Re alpha_ii, then diagonalizes
    the effective stiffness there so every collective mode gets a seed with
    its own damping width (weakly damped modes are much narrower than the
    single-probe estimate).
    """
    gmat = _coupling_matrix(bath, probes, renormalization)
    mask = bath._offdiag_mask()
    m_isqrt = 1.0 / np.sqrt(probes.masses)
    out = []
    seen = set()
    for i in range(probes.n):
        key = (gmat[i, i], probes.masses[i])
        if key in seen:
            continue
        seen.add(key)
        m_i = probes.masses[i]

        def re_alpha(w, gii=gmat[i, i], m=m_i):
            return gii - m * w * w - float(lorentzian(bath, w)) * bath.cutoff

        if re_alpha(0.0) <= 0 or re_alpha(hi) >= 0:
            continue
        wr = brentq(re_alpha, 1e-12, hi, xtol=1e-12, rtol=1e-12)
        width = bath.gamma2 * bath.cutoff**2 / ((wr**2 + bath.cutoff**2) * 2.0 * m_i)
        out.append((wr, max(width, 1e-9 * wr)))
        if probes.n > 1:
            out.extend(_collective_modes(bath, probes, gmat, wr, hi))
    return out


def _effective_stiffness_batch(bath, probes, gmat, omegas):
    """Mass-weighted stiffness gmat - Re(chi) at each frequency, (K, N, N)."""
    mask = bath._offdiag_mask()
    m_isqrt = 1.0 / np.sqrt(probes.masses)
    weight = np.outer(m_isqrt, m_isqrt)
    lor = lorentzian(bath, omegas)[:, None, None]
    re_chi = lor * (bath.cutoff * np.exp(-bath.cutoff * bath.delays)[None]
                    - omegas[:, None, None] * np.sin(omegas[:, None, None]
                                                     * bath.delays[None]))
    return (gmat[None] - re_chi * mask[None]) * weight[None]


def _collective_modes(bath, probes, gmat, wr, hi):
    """Locate every collective resonance and its damping half-width.

    The sorted eigenvalue branches of the effective stiffness are continuous
    in frequency; each crossing of the k-th branch with w^2 is bracketed on a
    scan grid and polished with brentq.  Near-dark modes (eigenvector almost
    orthogonal to the rank-two damped subspace) come out extremely narrow, so
    peak positions must be located to within their own width.
    """
    lo_b, hi_b = 0.02 * wr, min(2.5 * wr, hi)
    grid = np.linspace(lo_b, hi_b, 1200)
    lam_grid = np.linalg.eigvalsh(_effective_stiffness_batch(bath, probes, gmat, grid))
    h_grid = lam_grid - (grid**2)[:, None]
    mask = bath._offdiag_mask()
    m_isqrt = 1.0 / np.sqrt(probes.masses)
    weight = np.outer(m_isqrt, m_isqrt)
    modes = []
    for k in range(probes.n):
        h_k = h_grid[:, k]
        crossings = np.nonzero(h_k[:-1] * h_k[1:] < 0)[0]
        for idx in crossings:
            def branch(w, kk=k):
                stiff = _effective_stiffness_batch(bath, probes, gmat,
                                                   np.array([w]))[0]
                return np.linalg.eigvalsh(stiff)[kk] - w * w

            w_k = brentq(branch, grid[idx], grid[idx + 1], xtol=1e-14, rtol=1e-14)
            stiff = _effective_stiffness_batch(bath, probes, gmat,
                                               np.array([w_k]))[0]
            _, vecs = np.linalg.eigh(stiff)
            vec = vecs[:, k]
            lor = float(lorentzian(bath, np.array([w_k]))[0])
            j_weighted = lor * w_k * np.cos(w_k * bath.delays) * mask * weight
            damping = abs(vec @ j_weighted @ vec) / (2.0 * w_k)
            modes.append((w_k, max(damping, 1e-13 * w_k)))
    return modes


def _initial_breakpoints(bath, probes, temps, lo, hi, renormalization):
    pts = {lo, hi}
    spread = (-1000.0, -300.0, -100.0, -30.0, -10.0, -3.0, -1.0, -0.3,
              0.0, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0)
    for wr, width in _resonances(bath, probes, renormalization, hi):
        for c in spread:
            w = wr + c * width
            if lo < w < hi:
                pts.add(w)
    gmat = _coupling_matrix(bath, probes, renormalization)
    mean_mass = float(np.mean(probes.masses))
    for lam in np.linalg.eigvalsh(gmat):
        if lam > 0:
            w = math.sqrt(lam / mean_mass)
            if lo < w < hi:
                pts.add(w)
    for c in (0.5, 1.0, 2.0, 5.0):
        w = c * bath.cutoff
        if lo < w < hi:
            pts.add(w)
    for temp in temps:
        for c in (0.3, 1.0, 3.0, 10.0, 30.0):
            w = c * temp
            if lo < w < hi:
                pts.add(w)
    # geometric ladder so no decade is left without a seed
    w = max(lo, 1e-3 * min(min(temps), 1.0))
    while w < hi:
        if w > lo:
            pts.add(w)
        w *= 2.0
    return sorted(_with_oscillation_fill(pts, bath, lo, hi))


def _with_oscillation_fill(pts, bath, lo, hi):
    """Cap initial panel width to a fraction of the fastest cos(w*a) period."""
    amax = float(bath.delays.max())
    if amax > 0:
        cap = 2.0 * math.pi / (3.0 * amax)
        n = int(min((hi - lo) / cap, _OSC_PANEL_BUDGET))
        if n > 1:
            pts = set(pts) | set(np.linspace(lo, hi, n + 1))
    return pts


def _segment_breakpoints(lo, hi):
    """Breakpoints for a high-frequency extension segment [lo, hi].

    Extension segments integrate the asymptote-subtracted integrand, whose
    oscillatory part is below tolerance, so no oscillation fill is needed.
    """
    return np.geomspace(lo, hi, 17)


# ---------------------------------------------------------------------------
# high-frequency tail corrections


def _tail_int_pp(gamma2, cutoff, w_max, delay):
    """integral_W^inf gamma2 cutoff^2 cos(a w) / (pi w (w^2 + cutoff^2)) dw."""
    if delay == 0.0:
        return gamma2 / (2.0 * math.pi) * math.log1p((cutoff / w_max) ** 2)

    def f(w):
        return gamma2 * cutoff**2 / (math.pi * w * (w * w + cutoff**2))

    val, _ = _scipy_quad(f, w_max, np.inf, weight="cos", wvar=delay,
                         epsabs=1e-16, epsrel=1e-12, limit=200, limlst=200)
    return val


def _tail_int_xx(gamma2, cutoff, w_max, delay):
    """Same as _tail_int_pp with an extra 1/w^2 (masses applied by caller)."""
    if delay == 0.0:
        x = (cutoff / w_max) ** 2
        i3 = (x - math.log1p(x)) / (2.0 * cutoff**4)
        return gamma2 * cutoff**2 / math.pi * i3

    def f(w):
        return gamma2 * cutoff**2 / (math.pi * w**3 * (w * w + cutoff**2))

    val, _ = _scipy_quad(f, w_max, np.inf, weight="cos", wvar=delay,
                         epsabs=1e-18, epsrel=1e-12, limit=200, limlst=200)
    return val


def _tail_matrices(bath, probes, w_max):
    """Leading truncation corrections (coth -> 1) for the xx and pp blocks."""
    mask = bath._offdiag_mask()
    values_pp = {}
    values_xx = {}
    for a in np.unique(bath.delays):
        values_pp[a] = _tail_int_pp(bath.gamma2, bath.cutoff, w_max, float(a))
        values_xx[a] = _tail_int_xx(bath.gamma2, bath.cutoff, w_max, float(a))
    pp = np.vectorize(values_pp.get)(bath.delays) * mask
    xx = np.vectorize(values_xx.get)(bath.delays) * mask
    inv_m = 1.0 / probes.masses
    return xx * np.outer(inv_m, inv_m), pp


def _tail_remainder(bath, probes, w_max, temps, renormalization):
    """Bound on the error of the tail corrections (drives cutoff doubling)."""
    gmat = _coupling_matrix(bath, probes, renormalization)
    k_bound = float(np.linalg.norm(gmat, 2)) + bath.gamma2 * bath.cutoff**2 * (
        bath.cutoff / w_max**2 + 1.0 / w_max
    )
    m_min = float(probes.masses.min())
    x = (bath.cutoff / w_max) ** 2
    i3 = (x - math.log1p(x)) / (2.0 * bath.cutoff**4)
    base = bath.gamma2 * bath.cutoff**2 / math.pi
    rem_pp = (2.0 * k_bound / m_min) * base * i3
    rem_xx = (2.0 * k_bound / m_min**3) * base / (4.0 * w_max**4 * bath.cutoff**2)
    t_max = max(temps)
    pp0 = _tail_int_pp(bath.gamma2, bath.cutoff, w_max, 0.0)
    thermal = 2.0 * math.exp(-w_max / t_max) * pp0
    deriv = (2.0 * w_max / t_max**2) * math.exp(-w_max / t_max) * pp0
    return max(rem_pp, rem_xx) + thermal + deriv


# ---------------------------------------------------------------------------
# main solve paths


def _solve_full(bath, probes, temps, config, renormalization, with_derivative):
    _check_static_stability(bath, probes, renormalization)
    f, f_diff, groups, unpack, n_tri, n_fam = _make_integrand(
        bath, probes, temps, renormalization, with_derivative
    )
    w_start = config.omega_max_mult * bath.cutoff
    pts = _initial_breakpoints(bath, probes, temps, 0.0, w_start, renormalization)
    result = adaptive_integrate(
        f, pts, rel_tol=config.rel_tol, abs_tol=config.abs_tol,
        max_panels=config.max_subdivisions, groups=groups,
    )
    total, toterr = result.value, result.error
    # analytic tail from w_start onward; extension segments then integrate
    # only the (tiny, smooth) difference between the kernel and its asymptote
    xx_tail, pp_tail = _tail_matrices(bath, probes, w_start)
    group_scales = np.array([
        np.abs(total[groups == gid]).max() for gid in range(groups.max() + 1)
    ])
    w_max = w_start
    remainder = _tail_remainder(bath, probes, w_max, temps, renormalization)
    doublings = 0
    while remainder > config.abs_tol and doublings < config.max_doublings:
        seg = adaptive_integrate(
            f_diff, _segment_breakpoints(w_max, 2.0 * w_max),
            rel_tol=config.rel_tol, abs_tol=config.abs_tol,
            max_panels=config.max_subdivisions, groups=groups,
            scale_floors=group_scales,
        )
        total = total + seg.value
        toterr = toterr + seg.error
        w_max *= 2.0
        doublings += 1
        remainder = _tail_remainder(bath, probes, w_max, temps, renormalization)

    solutions = []
    for ti, temp in enumerate(temps):
        base = ti * n_fam * n_tri
        xx = unpack(total[base:base + n_tri]) + xx_tail
        pp = unpack(total[base + n_tri:base + 2 * n_tri]) + pp_tail
        gamma = CovMatrix.from_blocks(xx, pp)
        dgamma = None
        if with_derivative:
            dxx = unpack(total[base + 2 * n_tri:base + 3 * n_tri])
            dpp = unpack(total[base + 3 * n_tri:base + 4 * n_tri])
            dgamma = CovMatrix.from_blocks(dxx, dpp).data
        err = float(toterr[base:base + n_fam * n_tri].max()) + remainder
        solutions.append(NessSolution(temp, gamma, dgamma, err))
    return solutions


def _tileable(problem: NessProblem) -> bool:
    return (problem.bath.scenario is Scenario.INDEPENDENT
            and not np.any(problem.probes.couplings))


def _tile_family(problem, temps, with_derivative):
    """Independent uncoupled probes: solve each distinct probe once, tile blocks."""
    probes = problem.probes
    keys = [(float(m), float(w)) for m, w in zip(probes.masses, probes.frequencies)]
    singles = {}
    for key in keys:
        if key in singles:
            continue
        sub_probes = ProbeChain.chain(1, omega0=key[1], mass=key[0],
                                      spacing=probes.spacing)
        sub_bath = replace(problem.bath, delays=np.zeros((1, 1)))
        singles[key] = _solve_full(sub_bath, sub_probes, temps,
                                   problem.quadrature, problem.renormalization,
                                   with_derivative)
    n = probes.n
    out = []
    for ti, temp in enumerate(temps):
        gamma = np.zeros((2 * n, 2 * n))
        dgamma = np.zeros((2 * n, 2 * n)) if with_derivative else None
        err = 0.0
        for i, key in enumerate(keys):
            sol = singles[key][ti]
            sl = slice(2 * i, 2 * i + 2)
            gamma[sl, sl] = sol.covariance.data
            if with_derivative:
                dgamma[sl, sl] = sol.temperature_derivative
            err = max(err, sol.error_estimate)
        out.append(NessSolution(temp, CovMatrix(n, gamma), dgamma, err))
    return out


def steady_state_family(problem: NessProblem, temperatures,
                        with_derivative: bool = True) -> list[NessSolution]:
    """Solve the same chain at several temperatures over one shared panel set."""
    temps = [float(t) for t in temperatures]
    if any(t <= 0 for t in temps):
        raise DomainError("temperatures must be positive")
    if _tileable(problem):
        return _tile_family(problem, temps, with_derivative)
    return _solve_full(problem.bath, problem.probes, temps, problem.quadrature,
                       problem.renormalization, with_derivative)


def solve_steady_state(problem: NessProblem, with_derivative: bool = True) -> NessSolution:
    return steady_state_family(problem, [problem.temperature], with_derivative)[0]


def steady_state_covariance(problem: NessProblem) -> CovMatrix:
    return solve_steady_state(problem, with_derivative=False).covariance


def covariance_temperature_derivative(problem: NessProblem) -> NDArray[np.float64]:
    return solve_steady_state(problem).temperature_derivative


def correlation_profile(problem: NessProblem, kind: CorrelationKind = CorrelationKind.XX,
                        reference: int = 0):
    """Correlations of every mode with the reference mode, from one solve."""
    if not 0 <= reference < problem.probes.n:
        raise DomainError("reference mode out of range")
    gamma = steady_state_covariance(problem)
    block = position_block(gamma) if kind is CorrelationKind.XX else momentum_block(gamma)
    return [(n, float(block[reference, n])) for n in range(problem.probes.n)]
