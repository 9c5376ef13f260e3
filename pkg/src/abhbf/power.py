"""Waterfilling power allocation."""

from __future__ import annotations

import numpy as np


def waterfill(gains, total_power: float, tol: float = 1e-12, max_iter: int = 500) -> np.ndarray:
    """Allocate ``total_power`` over parallel channels with SNR-per-unit-power ``gains``.

    Solves ``max sum log(1 + p_i g_i)`` s.t. ``sum p_i = total_power`` with
    ``p_i = max(0, mu - 1/g_i)``, locating the water level ``mu`` by bisection.
    Channels with zero gain get zero power.

    Raises
    ------
    ValueError
        If every gain is zero, any gain is negative, or ``total_power <= 0``.
    """
    g = np.asarray(gains, dtype=float)
    if np.any(g < 0):
        raise ValueError("gains must be nonnegative")
    if total_power <= 0:
        raise ValueError("total_power must be positive")
    active = g > 0
    if not np.any(active):
        raise ValueError("waterfilling needs at least one positive gain")
    with np.errstate(over="ignore"):
        inv = 1.0 / g[active]
    if not np.isfinite(inv.min()):
        # every gain is subnormal; in the limit only the strongest channels are filled
        best = g == g.max()
        return np.where(best, total_power / best.sum(), 0.0)

    def used(mu):
        with np.errstate(invalid="ignore"):
            return np.maximum(mu - inv, 0.0).sum()

    # the strongest channel alone absorbs total_power at mu = min(inv) + total_power
    lo = inv.min()
    hi = inv.min() + total_power
    for _ in range(max_iter):
        mu = 0.5 * (lo + hi)
        if used(mu) > total_power:
            hi = mu
        else:
            lo = mu
        if hi - lo <= tol * max(1.0, hi):
            break
    p = np.zeros_like(g)
    p[active] = np.maximum(0.5 * (lo + hi) - inv, 0.0)
    # remove the residual bisection error from the active set
    on = p > 0
    p[on] += (total_power - p.sum()) / on.sum()
    return p
