"""Beam-split analysis: frequency-shifted directions and normalized array gain.

A beam matched at the carrier points elsewhere on subcarrier ``f``, since the
directional cosines seen by the array scale by ``f / fc``. The normalized gain
of a matched single beam factorizes into two Dirichlet kernels, which are
close to a product of sinc functions for small deviations.

Single-beam beamformers use the matched convention ``w = a(dir, 1) / m`` so
that the matched narrowband gain is exactly 1.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .geometry import (
    DirectionalCosinePair,
    UraGeometry,
    direction_from_angles,
    steering_vector,
)

_NULL_TOL = 1e-8


def direction_components(theta: float, psi: float, f: float, fc: float) -> DirectionalCosinePair:
    """Directional cosines of (theta, psi) as seen by the array at frequency ``f``."""
    if f <= 0 or fc <= 0:
        raise ValueError("frequencies must be positive")
    u, v = direction_from_angles(theta, psi)
    r = f / fc
    return DirectionalCosinePair(r * u, r * v)


def direction_deviation(theta: float, psi: float, f: float, fc: float) -> tuple[float, float]:
    """Shift ``(dU, dV) = (f/fc - 1) * (u, v)`` of the seen direction relative to the carrier."""
    if f <= 0 or fc <= 0:
        raise ValueError("frequencies must be positive")
    u, v = direction_from_angles(theta, psi)
    eps = f / fc - 1.0
    return eps * u, eps * v


def matched_beamformer(geom: UraGeometry, direction: DirectionalCosinePair) -> np.ndarray:
    """Carrier-matched single beam scaled by ``1/m``."""
    return steering_vector(geom, direction, 1.0) / geom.m


def exact_array_gain(
    beamformer: np.ndarray, geom: UraGeometry, theta: float, psi: float, f: float, fc: float
) -> float:
    """``|a^H(theta, psi, f) w|`` for a beamformer ``w`` of length ``geom.m``."""
    w = np.asarray(beamformer)
    if w.shape != (geom.m,):
        raise ValueError(f"beamformer has shape {w.shape}, expected ({geom.m},)")
    if f <= 0 or fc <= 0:
        raise ValueError("frequencies must be positive")
    a = steering_vector(geom, direction_from_angles(theta, psi), f / fc)
    return float(abs(np.vdot(a, w)))


def dirichlet(m: int, x):
    """Dirichlet kernel ``sin(m x / 2) / sin(x / 2)``, with the limit ``+-m`` at the nulls of the denominator."""
    x = np.asarray(x, dtype=float)
    # distance of x/2 to the nearest multiple of pi
    k = np.round(x / (2 * np.pi))
    near = np.abs(x - 2 * np.pi * k) < _NULL_TOL
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sin(m * x / 2) / np.sin(x / 2)
    # limit at x = 2 pi k is m * (-1)^(k (m - 1))
    limit = m * np.where((k * (m - 1)) % 2 == 0, 1.0, -1.0)
    out = np.where(near, limit, out)
    return out if out.ndim else float(out)


def dirichlet_gain(geom: UraGeometry, dU, dV):
    """Closed-form normalized gain ``|D_mx(pi dU) D_my(pi dV)| / m`` of a deviated matched beam."""
    g = np.abs(dirichlet(geom.m_x, np.pi * np.asarray(dU)) * dirichlet(geom.m_y, np.pi * np.asarray(dV)))
    g = g / geom.m
    return g if np.ndim(g) else float(g)


def _sinc(x):
    # numpy's sinc is the normalized sin(pi x)/(pi x)
    return np.sinc(np.asarray(x, dtype=float) / np.pi)


def sinc_gain_approx(geom: UraGeometry, dU, dV):
    """Separable sinc approximation ``|sinc(m_x pi dU / 2) sinc(m_y pi dV / 2)|``."""
    g = np.abs(_sinc(geom.m_x * np.pi * np.asarray(dU) / 2) * _sinc(geom.m_y * np.pi * np.asarray(dV) / 2))
    return g if np.ndim(g) else float(g)


def gain_profile(
    beam,
    geom: UraGeometry,
    theta: float,
    psi: float,
    frequencies: Sequence[float],
    fc: float,
) -> np.ndarray:
    """Gain toward (theta, psi) at each frequency.

    ``beam`` is either a single beamformer vector (scored with
    :func:`exact_array_gain`) or a beam selection / orthonormal RF matrix
    (scored with :func:`abhbf.hbf.projection_gain`).
    """
    if isinstance(beam, np.ndarray) and beam.ndim == 1:
        return np.array([exact_array_gain(beam, geom, theta, psi, f, fc) for f in frequencies])
    from .hbf import projection_gain

    return np.array([projection_gain(beam, geom, theta, psi, f, fc) for f in frequencies])
