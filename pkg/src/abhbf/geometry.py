"""Uniform rectangular array (URA) geometry.

Steering vectors, directional-cosine conversions and the quantized angle grid
whose steering vectors form an orthogonal beam dictionary.

Element ordering is Kronecker order with the x-dimension as the outer factor
and the y-dimension as the inner factor, i.e. element ``x * m_y + y``.
Steering vectors are returned unnormalized (unit-modulus entries).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class VisibleRegionError(ValueError):
    """Directional cosines outside the unit disk (no physical angle)."""


@dataclass(frozen=True)
class UraGeometry:
    """Rectangular array with ``m_x`` rows and ``m_y`` columns of elements."""

    m_x: int
    m_y: int

    def __post_init__(self):
        for name in ("m_x", "m_y"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))

    @property
    def m(self) -> int:
        return self.m_x * self.m_y


class DirectionalCosinePair(NamedTuple):
    """Directional cosines ``(u, v) = (sin(theta)cos(psi), sin(theta)sin(psi))``."""

    u: float
    v: float


@dataclass(frozen=True)
class QuantizedAngleGrid:
    """The ``m_x * m_y`` orthogonal grid directions of a URA, x-major order."""

    geometry: UraGeometry
    pairs: tuple[DirectionalCosinePair, ...]

    def __len__(self):
        return len(self.pairs)

    @property
    def u(self) -> np.ndarray:
        return np.array([p.u for p in self.pairs])

    @property
    def v(self) -> np.ndarray:
        return np.array([p.v for p in self.pairs])

    def steering_matrix(self, freq_ratio: float = 1.0) -> np.ndarray:
        """Unnormalized steering vectors of every grid pair as columns, shape (m, m)."""
        return steering_matrix(self.geometry, self.u, self.v, freq_ratio)


def _check_ratio(freq_ratio):
    if not np.all(np.asarray(freq_ratio) > 0):
        raise ValueError(f"frequency ratio must be positive, got {freq_ratio!r}")


def steering_vector_1d(m: int, component: float, freq_ratio: float = 1.0) -> np.ndarray:
    """Half-wavelength ULA response ``exp(j*pi*r*n*component)``, n = 0..m-1."""
    _check_ratio(freq_ratio)
    n = np.arange(m)
    return np.exp(1j * np.pi * freq_ratio * component * n)


def steering_vector(
    geom: UraGeometry, direction: DirectionalCosinePair, freq_ratio: float = 1.0
) -> np.ndarray:
    """URA response toward ``direction`` at subcarrier/carrier ratio ``freq_ratio``.

    Parameters
    ----------
    geom : UraGeometry
        Array dimensions.
    direction : DirectionalCosinePair
        Directional cosines ``(u, v)`` at the carrier.
    freq_ratio : float
        ``f_k / f_c``; scales every phase increment.

    Returns
    -------
    numpy.ndarray
        Complex vector of length ``geom.m``. Entry ``x * m_y + y`` equals
        ``exp(j*pi*freq_ratio*(x*u + y*v))``.
    """
    u, v = direction
    return np.kron(
        steering_vector_1d(geom.m_x, u, freq_ratio),
        steering_vector_1d(geom.m_y, v, freq_ratio),
    )


def _element_indices(geom: UraGeometry):
    x = np.repeat(np.arange(geom.m_x), geom.m_y)
    y = np.tile(np.arange(geom.m_y), geom.m_x)
    return x, y


def array_phase(geom: UraGeometry, direction: DirectionalCosinePair) -> np.ndarray:
    """Per-element phase ``pi*(x*u + y*v)`` at the carrier, in Kronecker order."""
    x, y = _element_indices(geom)
    return np.pi * (x * direction[0] + y * direction[1])


def steering_matrix(geom: UraGeometry, u, v, freq_ratio: float = 1.0) -> np.ndarray:
    """Steering vectors for many directions at once, as columns of an (m, n) array."""
    _check_ratio(freq_ratio)
    u = np.atleast_1d(np.asarray(u, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    x, y = _element_indices(geom)
    phase = np.pi * freq_ratio * (np.outer(x, u) + np.outer(y, v))
    return np.exp(1j * phase)


def direction_from_angles(theta: float, psi: float) -> DirectionalCosinePair:
    """Map (theta, psi) in radians to directional cosines."""
    s = np.sin(theta)
    return DirectionalCosinePair(float(s * np.cos(psi)), float(s * np.sin(psi)))


def angles_from_direction(direction: DirectionalCosinePair) -> tuple[float, float]:
    """Inverse of :func:`direction_from_angles` on the front hemisphere.

    Returns ``theta`` in [0, pi/2] and ``psi`` in (-pi, pi]; ``psi`` is 0 at
    the pole. Raises :class:`VisibleRegionError` when ``u**2 + v**2 > 1``.
    """
    u, v = direction
    rho = float(np.hypot(u, v))
    if rho > 1.0 + 1e-12:
        raise VisibleRegionError(f"direction ({u}, {v}) lies outside the visible region")
    theta = float(np.arcsin(min(rho, 1.0)))
    psi = float(np.arctan2(v, u)) if rho > 0 else 0.0
    if psi == -np.pi:
        psi = np.pi
    return theta, psi


def quantized_grid(geom: UraGeometry) -> QuantizedAngleGrid:
    """Grid pairs ``((2x-1)/m_x - 1, (2y-1)/m_y - 1)``, x = 1..m_x outer, y = 1..m_y inner."""
    lam_x = (2 * np.arange(1, geom.m_x + 1) - 1) / geom.m_x - 1
    lam_y = (2 * np.arange(1, geom.m_y + 1) - 1) / geom.m_y - 1
    pairs = tuple(
        DirectionalCosinePair(float(ux), float(vy)) for ux in lam_x for vy in lam_y
    )
    return QuantizedAngleGrid(geom, pairs)
