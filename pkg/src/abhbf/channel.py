"""Wideband geometric THz channel.

Each path contributes a rank-one term with a spreading/absorption gain, a
delay phasor and frequency-dependent transmit/receive array responses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .geometry import UraGeometry, array_phase, direction_from_angles

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class PathParams:
    """One propagation path. Angles in radians, delay in seconds, distance in meters."""

    theta_t: float
    psi_t: float
    theta_r: float
    psi_r: float
    delay: float
    distance: float
    extra_loss: float = 1.0

    def __post_init__(self):
        if self.delay < 0:
            raise ValueError(f"delay must be >= 0, got {self.delay}")
        if self.distance <= 0:
            raise ValueError(f"distance must be > 0, got {self.distance}")
        if not 0 < self.extra_loss <= 1:
            raise ValueError(f"extra_loss must lie in (0, 1], got {self.extra_loss}")


@dataclass(frozen=True)
class AbsorptionModel:
    """Molecular absorption coefficient tau_a(f) in 1/m.

    Either a constant or a table of ``(frequency_hz, coefficient)`` samples,
    linearly interpolated with constant extrapolation past either end.
    """

    constant: float = 0.0
    table: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.constant < 0:
            raise ValueError("absorption coefficient must be >= 0")
        if self.table:
            freqs = np.array([row[0] for row in self.table], dtype=float)
            coeffs = np.array([row[1] for row in self.table], dtype=float)
            if np.any(np.diff(freqs) <= 0):
                raise ValueError("absorption table frequencies must be strictly increasing")
            if np.any(coeffs < 0):
                raise ValueError("absorption coefficients must be >= 0")
            object.__setattr__(
                self, "table", tuple((float(f), float(c)) for f, c in self.table)
            )

    def coefficient(self, f):
        if not self.table:
            return np.zeros_like(np.asarray(f, dtype=float)) + self.constant
        freqs, coeffs = zip(*self.table)
        return np.interp(f, freqs, coeffs)


NO_ABSORPTION = AbsorptionModel()


@dataclass(frozen=True)
class ChannelRealization:
    """Per-subcarrier channel matrices, shape (K, M_R, M_T), and their paths."""

    frequencies: np.ndarray
    matrices: np.ndarray
    paths: tuple[PathParams, ...] = field(default=())

    @property
    def K(self) -> int:
        return len(self.frequencies)


def subcarrier_frequencies(fc: float, bandwidth: float, K: int) -> np.ndarray:
    """Uniform OFDM grid ``fc + B*(2k - K - 1)/(2K)``, k = 1..K, symmetric about fc."""
    if int(K) != K or K < 1:
        raise ValueError(f"K must be a positive integer, got {K!r}")
    if bandwidth < 0:
        raise ValueError(f"bandwidth must be >= 0, got {bandwidth}")
    if fc <= bandwidth / 2:
        raise ValueError("carrier must exceed half the bandwidth")
    k = np.arange(1, K + 1)
    return fc + bandwidth * (2 * k - K - 1) / (2 * K)


def path_gain(f, distance: float, absorption: AbsorptionModel = NO_ABSORPTION):
    """Free-space spreading loss times absorption, ``c/(4 pi f d) * exp(-tau_a(f) d / 2)``."""
    f = np.asarray(f, dtype=float)
    gain = SPEED_OF_LIGHT / (4 * np.pi * f * distance) * np.exp(
        -0.5 * absorption.coefficient(f) * distance
    )
    return gain if gain.ndim else float(gain)


def sample_paths(scenario, rng: np.random.Generator) -> list[PathParams]:
    """Draw the L paths of one channel realization.

    Path angles are drawn uniformly within +-spread of the configured
    per-path centers (AoD and AoA). The first path is line-of-sight with the
    direct delay and no extra loss; later paths add a uniform excess delay in
    (0, delay_spread] and a log-uniform attenuation in [min_nlos_loss, 1).
    """
    los_delay = scenario.d_T / SPEED_OF_LIGHT
    paths = []
    for ell in range(scenario.L):
        (th_t, ps_t), (dth_t, dps_t) = scenario.aod_centers[ell], scenario.aod_spreads[ell]
        (th_r, ps_r), (dth_r, dps_r) = scenario.aoa_centers[ell], scenario.aoa_spreads[ell]
        theta_t = th_t + dth_t * rng.uniform(-1.0, 1.0)
        psi_t = ps_t + dps_t * rng.uniform(-1.0, 1.0)
        theta_r = th_r + dth_r * rng.uniform(-1.0, 1.0)
        psi_r = ps_r + dps_r * rng.uniform(-1.0, 1.0)
        if ell == 0:
            delay, loss = los_delay, 1.0
        else:
            # 1 - U maps [0, 1) onto (0, 1]
            delay = los_delay + scenario.delay_spread * (1.0 - rng.uniform())
            loss = float(np.exp(rng.uniform(np.log(scenario.min_nlos_loss), 0.0)))
        paths.append(
            PathParams(theta_t, psi_t, theta_r, psi_r, delay, scenario.d_T, loss)
        )
    return paths


def channel_matrices(
    paths: Sequence[PathParams],
    geom_t: UraGeometry,
    geom_r: UraGeometry,
    freqs,
    fc: float,
    absorption: AbsorptionModel = NO_ABSORPTION,
) -> np.ndarray:
    """Channel at every frequency in ``freqs``, shape (K, M_R, M_T)."""
    freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
    if np.any(freqs <= 0):
        raise ValueError("frequencies must be positive")
    H = np.zeros((len(freqs), geom_r.m, geom_t.m), dtype=complex)
    for p in paths:
        dir_t = direction_from_angles(p.theta_t, p.psi_t)
        dir_r = direction_from_angles(p.theta_r, p.psi_r)
        alpha = (
            p.extra_loss
            * path_gain(freqs, p.distance, absorption)
            * np.exp(-2j * np.pi * p.delay * freqs)
        )
        ratios = freqs / fc
        a_t = np.exp(1j * np.outer(ratios, array_phase(geom_t, dir_t)))
        a_r = np.exp(1j * np.outer(ratios, array_phase(geom_r, dir_r)))
        H += alpha[:, None, None] * a_r[:, :, None] * a_t.conj()[:, None, :]
    return H


def channel_matrix(
    paths: Sequence[PathParams],
    geom_t: UraGeometry,
    geom_r: UraGeometry,
    f: float,
    fc: float,
    absorption: AbsorptionModel = NO_ABSORPTION,
) -> np.ndarray:
    """Sum of rank-one path terms at frequency ``f``, shape (M_R, M_T)."""
    return channel_matrices(paths, geom_t, geom_r, [f], fc, absorption)[0]


def realize_channel(scenario, rng: np.random.Generator) -> ChannelRealization:
    """Sample paths and evaluate the channel on the scenario's subcarrier grid."""
    paths = sample_paths(scenario, rng)
    freqs = subcarrier_frequencies(scenario.fc, scenario.bandwidth, scenario.K)
    H = channel_matrices(
        paths, scenario.tx_geometry, scenario.rx_geometry, freqs, scenario.fc,
        scenario.absorption,
    )
    return ChannelRealization(freqs, H, tuple(paths))
