"""Adaptive Gauss-Kronrod quadrature for vector-valued integrands.

A single adaptive pass integrates all components of a vector integrand over a
shared panel set, so expensive kernel evaluations (matrix inversions) are
amortised across every covariance entry and every temperature of a sweep.
Convergence is judged per component group: each group's summed panel error
must fall below max(abs_tol, rel_tol * group scale), where the scale is the
largest component magnitude in the group.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import QuadratureError

# 15-point Kronrod nodes on [-1, 1] and weights, with the embedded 7-point
# Gauss weights on the odd-indexed nodes (QUADPACK dqk15 constants).
_XGK_HALF = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0,
])
_WGK_HALF = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
])
_WG_HALF = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
])

_NODES = np.concatenate([-_XGK_HALF[:-1], [0.0], _XGK_HALF[-2::-1]])
_W_KRONROD = np.concatenate([_WGK_HALF[:-1], [_WGK_HALF[-1]], _WGK_HALF[-2::-1]])
_W_GAUSS = np.zeros(15)
_W_GAUSS[1:-1:2] = np.concatenate([_WG_HALF[:-1], [_WG_HALF[-1]], _WG_HALF[-2::-1]])

_EVAL_CHUNK = 4096  # nodes per kernel call, bounds peak memory


@dataclass
class PanelIntegral:
    """Result of an adaptive pass: component values, error sums, and stats."""

    value: NDArray[np.float64]
    error: NDArray[np.float64]
    n_panels: int
    n_evaluations: int


def _evaluate(f, lows, highs):
    """Kronrod/Gauss panel integrals for a batch of panels."""
    half = 0.5 * (highs - lows)
    mid = 0.5 * (highs + lows)
    omegas = (mid[:, None] + half[:, None] * _NODES[None, :]).reshape(-1)
    n_panels = len(lows)
    vals = None
    for start in range(0, len(omegas), _EVAL_CHUNK):
        chunk = f(omegas[start:start + _EVAL_CHUNK])
        if vals is None:
            vals = np.empty((len(omegas), chunk.shape[-1]))
        vals[start:start + _EVAL_CHUNK] = chunk
    vals = vals.reshape(n_panels, 15, -1)
    kron = np.einsum("k,pkf->pf", _W_KRONROD, vals) * half[:, None]
    gauss = np.einsum("k,pkf->pf", _W_GAUSS, vals) * half[:, None]
    return kron, np.abs(kron - gauss)


def adaptive_integrate(
    f,
    breakpoints,
    rel_tol: float = 1e-9,
    abs_tol: float = 1e-12,
    max_panels: int = 100_000,
    groups=None,
    scale_floors=None,
) -> PanelIntegral:
    """Integrate f over [min(breakpoints), max(breakpoints)] adaptively.

    f maps an array of K abscissae to a (K, F) array of integrand components.
    `groups` assigns each component to a tolerance group (default: one group);
    `scale_floors` optionally supplies an external magnitude per group so a
    small correction integral can be judged against the quantity it corrects.
    Raises QuadratureError carrying the best value and achieved error estimate
    if the panel budget is exhausted before convergence.
    """
    pts = np.unique(np.asarray(breakpoints, dtype=float))
    if len(pts) < 2:
        raise ValueError("need at least two distinct breakpoints")
    lows, highs = pts[:-1].copy(), pts[1:].copy()
    vals, errs = _evaluate(f, lows, highs)
    n_eval = 15 * len(lows)
    if groups is None:
        groups = np.zeros(vals.shape[1], dtype=int)
    else:
        groups = np.asarray(groups, dtype=int)
    group_ids = np.unique(groups)

    while True:
        total = vals.sum(axis=0)
        toterr = errs.sum(axis=0)
        # per-component tolerance from the owning group's scale
        tol = np.empty_like(total)
        for gid in group_ids:
            mask = groups == gid
            scale = np.abs(total[mask]).max() if mask.any() else 0.0
            if scale_floors is not None:
                scale = max(scale, scale_floors[gid])
            tol[mask] = max(abs_tol, rel_tol * scale)
        failing = toterr > tol
        if not failing.any():
            return PanelIntegral(total, toterr, len(lows), n_eval)
        if len(lows) >= max_panels:
            raise QuadratureError(
                f"exceeded {max_panels} panels; achieved error "
                f"{float((toterr / np.maximum(tol, 1e-300)).max()):.3g}x tolerance",
                value=total,
                error_estimate=toterr,
            )
        score = (errs[:, failing] / tol[failing]).max(axis=1)
        # split the dominant offenders: anything within 1e-3 of the worst
        # panel, capped so each wave stays a reasonably batched evaluation
        candidates = int((score > 1e-3 * score.max()).sum())
        n_split = min(
            max(64, len(lows) // 8),
            max_panels - len(lows),
            max(candidates, 1),
        )
        worst = np.argpartition(score, -n_split)[-n_split:]
        mid = 0.5 * (lows[worst] + highs[worst])
        child_lo = np.concatenate([lows[worst], mid])
        child_hi = np.concatenate([mid, highs[worst]])
        child_vals, child_errs = _evaluate(f, child_lo, child_hi)
        n_eval += 15 * len(child_lo)
        keep = np.ones(len(lows), dtype=bool)
        keep[worst] = False
        lows = np.concatenate([lows[keep], child_lo])
        highs = np.concatenate([highs[keep], child_hi])
        vals = np.concatenate([vals[keep], child_vals])
        errs = np.concatenate([errs[keep], child_errs])
