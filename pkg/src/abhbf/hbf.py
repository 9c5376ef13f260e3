"""Angular-based hybrid beamforming (AB-HBF).

The RF stage is built from coarse angle knowledge only: every path
contributes an angle rectangle around its nominal AoD, the rectangles are
mapped to directional cosines, and the orthogonal grid beams falling inside
that support (plus each path's nearest grid beam) become the RF chains. The
baseband stage is a per-subcarrier SVD precoder on the effective channel.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import (
    DirectionalCosinePair,
    QuantizedAngleGrid,
    UraGeometry,
    VisibleRegionError,
    angles_from_direction,
    direction_from_angles,
    steering_matrix,
    steering_vector,
)
from .power import waterfill

POWER_MODES = ("equal", "waterfilling")
RF_MODES = ("carrier-flat", "per-subcarrier")

_ANGLE_TOL = 1e-12


@dataclass(frozen=True)
class SupportRect:
    """Angle rectangle ``[theta +- d_theta] x [psi +- d_psi]`` (radians)."""

    theta: float
    psi: float
    d_theta: float
    d_psi: float


@dataclass(frozen=True)
class AngularSupport:
    """Per-path AoD rectangles.

    With ``combine="union"`` the support is the union of the rectangles. With
    ``combine="product"`` it is the product of the union of all theta
    intervals with the union of all psi intervals, which also covers the
    cross combinations of different paths' angles.
    """

    rects: tuple[SupportRect, ...]
    combine: str = "union"

    @property
    def centers(self) -> list[DirectionalCosinePair]:
        return [direction_from_angles(r.theta, r.psi) for r in self.rects]


@dataclass(frozen=True)
class BeamSelection:
    """Grid beams chosen for the RF stage, kept in grid (x-major) order."""

    geometry: UraGeometry
    indices: tuple[int, ...]
    selected: tuple[DirectionalCosinePair, ...]

    @property
    def n_t(self) -> int:
        return len(self.selected)


@dataclass(frozen=True)
class HybridPrecoder:
    """RF matrix (m, n_t), or (K, m, n_t) per subcarrier, and basebands (K, n_t, N_D)."""

    rf: np.ndarray
    baseband: np.ndarray
    selection: BeamSelection | None = None

    def rf_at(self, k: int) -> np.ndarray:
        return self.rf if self.rf.ndim == 2 else self.rf[k]

    def precoders(self) -> np.ndarray:
        """Overall precoders ``F_k B_k``, shape (K, m, N_D)."""
        return np.matmul(self.rf, self.baseband)


SUPPORT_MODES = ("union", "product")


def build_support(
    central_paths: Sequence[tuple[float, float]],
    spreads: Sequence[tuple[float, float]],
    combine: str = "union",
) -> AngularSupport:
    """Angular support from nominal AoDs ``(theta, psi)`` and spreads ``(d_theta, d_psi)``."""
    if combine not in SUPPORT_MODES:
        raise ValueError(f"unknown support mode {combine!r}; expected one of {SUPPORT_MODES}")
    if len(central_paths) == 0:
        raise ValueError("angular support needs at least one path")
    if len(spreads) != len(central_paths):
        raise ValueError("one spread pair is required per path")
    rects = []
    for (theta, psi), (d_theta, d_psi) in zip(central_paths, spreads):
        if d_theta < 0 or d_psi < 0:
            raise ValueError("angular spreads must be nonnegative")
        rects.append(SupportRect(float(theta), float(psi), float(d_theta), float(d_psi)))
    return AngularSupport(tuple(rects), combine)


def _wrap(angle: float) -> float:
    """Wrap to (-pi, pi]."""
    a = (angle + np.pi) % (2 * np.pi) - np.pi
    return np.pi if a == -np.pi else a


def _theta_in(rect: SupportRect, theta: float) -> bool:
    return rect.theta - rect.d_theta - _ANGLE_TOL <= theta <= rect.theta + rect.d_theta + _ANGLE_TOL


def _psi_in(rect: SupportRect, psi: float) -> bool:
    return abs(_wrap(psi - rect.psi)) <= rect.d_psi + _ANGLE_TOL


def _in_support(support: AngularSupport, theta: float, psi: float, at_pole: bool) -> bool:
    if support.combine == "product":
        return any(_theta_in(r, theta) for r in support.rects) and (
            at_pole or any(_psi_in(r, psi) for r in support.rects)
        )
    return any(_theta_in(r, theta) and (at_pole or _psi_in(r, psi)) for r in support.rects)


def contains(support: AngularSupport, pair: DirectionalCosinePair) -> bool:
    """Whether ``pair`` is the image of some angle inside the support.

    Rectangles may extend past the pole or past theta = pi/2, so the
    equivalent representations ``(pi - theta, psi)``, ``(-theta, psi + pi)``
    and ``(theta - pi, psi + pi)`` of the same direction are tried as well.
    """
    try:
        theta, psi = angles_from_direction(pair)
    except VisibleRegionError:
        return False
    at_pole = pair[0] == 0 and pair[1] == 0
    candidates = (
        (theta, psi),
        (np.pi - theta, psi),
        (-theta, psi + np.pi),
        (theta - np.pi, psi + np.pi),
    )
    return any(_in_support(support, t, p, at_pole) for t, p in candidates)


def select_angle_pairs(
    support: AngularSupport, grid: QuantizedAngleGrid, max_beams: int | None = None
) -> BeamSelection:
    """Grid beams inside the support plus the nearest grid beam of every path center.

    With ``max_beams`` set, the per-center nearest beams are always kept and
    the remaining budget goes to the beams closest (in ``(u, v)``) to any
    center, ties broken by grid order.
    """
    n_paths = len(support.rects)
    if max_beams is not None and max_beams < n_paths:
        raise ValueError(
            f"max_beams={max_beams} cannot keep one beam for each of {n_paths} paths"
        )
    gu, gv = grid.u, grid.v
    centers = np.array(support.centers)
    # (n_grid, n_paths) distances in the directional-cosine plane
    dist = np.hypot(gu[:, None] - centers[:, 0], gv[:, None] - centers[:, 1])
    nearest = [int(np.argmin(dist[:, ell])) for ell in range(n_paths)]

    chosen = {i for i, pair in enumerate(grid.pairs) if contains(support, pair)}
    chosen.update(nearest)

    if max_beams is not None and len(chosen) > max_beams:
        keep = list(dict.fromkeys(nearest))
        closest = dist.min(axis=1)
        rest = sorted((i for i in chosen if i not in keep), key=lambda i: (closest[i], i))
        chosen = set(keep + rest[: max_beams - len(keep)])

    indices = tuple(sorted(chosen))
    return BeamSelection(grid.geometry, indices, tuple(grid.pairs[i] for i in indices))


def rf_beamformer(
    selection: BeamSelection,
    freq_ratio_mode: str = "carrier-flat",
    freq_ratios: Sequence[float] | None = None,
) -> np.ndarray:
    """Unit-norm steering columns of the selected beams.

    ``carrier-flat`` returns one (m, n_t) matrix evaluated at the carrier;
    ``per-subcarrier`` returns (K, m, n_t), one matrix per entry of
    ``freq_ratios``.
    """
    geom = selection.geometry
    u = np.array([p.u for p in selection.selected])
    v = np.array([p.v for p in selection.selected])
    scale = 1.0 / np.sqrt(geom.m)
    if freq_ratio_mode == "carrier-flat":
        return steering_matrix(geom, u, v, 1.0) * scale
    if freq_ratio_mode == "per-subcarrier":
        if freq_ratios is None:
            raise ValueError("per-subcarrier mode needs freq_ratios")
        return np.stack([steering_matrix(geom, u, v, r) * scale for r in freq_ratios])
    raise ValueError(f"unknown RF mode {freq_ratio_mode!r}; expected one of {RF_MODES}")


def effective_channel(H: np.ndarray, rf: np.ndarray) -> np.ndarray:
    """Channel seen through the RF stage, ``H @ rf``."""
    if H.shape[-1] != rf.shape[-2]:
        raise ValueError(f"channel {H.shape} and RF matrix {rf.shape} do not conform")
    return H @ rf


def phase_fixed_svd(H: np.ndarray):
    """Full SVD with singular values descending and each right singular vector
    rotated so that its largest-magnitude entry is real and positive.

    The left singular vectors receive the same rotation, so ``U S V^H`` still
    reconstructs ``H``.
    """
    U, s, Vh = np.linalg.svd(H, full_matrices=True)
    V = Vh.conj().T
    idx = np.argmax(np.abs(V), axis=0)
    lead = V[idx, np.arange(V.shape[1])]
    rot = np.where(np.abs(lead) > 0, lead.conj() / np.abs(lead), 1.0)
    V = V * rot
    r = len(s)
    U = U.copy()
    U[:, :r] = U[:, :r] * rot[:r]
    return U, s, V.conj().T


def stream_powers(sigma, N_D: int, power_mode: str = "equal", snr: float | None = None):
    """Per-stream powers ``p_i**2`` for singular values ``sigma`` (length N_D).

    Streams with numerically zero singular value get no power; ``equal``
    gives the others unit power, ``waterfilling`` spreads a total of N_D over
    them for the per-stream SNR ``snr * sigma**2 / N_D``.
    """
    sigma = np.asarray(sigma, dtype=float)
    smax = sigma.max(initial=0.0)
    live = sigma > max(smax * 1e-10, np.finfo(float).tiny)
    p = np.zeros(N_D)
    if not np.any(live):
        return p
    if power_mode == "equal":
        p[live] = 1.0
    elif power_mode == "waterfilling":
        if snr is None or snr <= 0:
            raise ValueError("waterfilling needs a positive linear snr")
        p = waterfill(np.where(live, snr * sigma**2 / N_D, 0.0), float(N_D))
    else:
        raise ValueError(f"unknown power mode {power_mode!r}; expected one of {POWER_MODES}")
    return p


def baseband_precoder(
    H_eff: np.ndarray,
    N_D: int,
    power_mode: str = "equal",
    snr: float | None = None,
    rf: np.ndarray | None = None,
) -> np.ndarray:
    """SVD baseband precoder ``V_1 P`` for one subcarrier, shape (N_T, N_D).

    ``V_1`` holds the N_D dominant right singular vectors of ``H_eff`` and
    ``P`` is diagonal with ``sum(P**2) = N_D`` (see :func:`stream_powers`).
    If ``rf`` is given and its columns are not orthonormal (per-subcarrier RF
    mode), the result is rescaled so that ``||rf B||_F**2`` keeps that total.
    """
    M_R, N_T = H_eff.shape
    if N_D < 1 or N_D > min(N_T, M_R):
        raise ValueError(f"N_D={N_D} must lie in [1, min(N_T={N_T}, M_R={M_R})]")
    if rf is not None and rf.shape[1] != N_T:
        raise ValueError(f"RF matrix {rf.shape} does not match effective channel {H_eff.shape}")
    _, s, Vh = phase_fixed_svd(H_eff)
    V1 = Vh.conj().T[:, :N_D]
    sigma = np.zeros(N_D)
    sigma[: min(N_D, len(s))] = s[:N_D]
    p = stream_powers(sigma, N_D, power_mode, snr)
    B = V1 * np.sqrt(p)
    if rf is not None:
        used = np.linalg.norm(rf @ B) ** 2
        if used > 0:
            B = B * np.sqrt(p.sum() / used)
    return B


def is_orthonormal(rf: np.ndarray, tol: float = 1e-8) -> bool:
    gram = rf.conj().T @ rf
    return bool(np.max(np.abs(gram - np.eye(gram.shape[0]))) <= tol)


def projection_gain(beam, geom: UraGeometry, theta: float, psi: float, f: float, fc: float) -> float:
    """Normalized array gain of a multi-beam RF stage toward (theta, psi) at ``f``.

    The norm of the projection of the subcarrier steering vector onto the RF
    column space, divided by ``sqrt(m)``; a single matched beam at the carrier
    scores 1.

    ``beam`` is a :class:`BeamSelection` (carrier-flat RF is built from it) or
    an RF matrix with orthonormal columns.
    """
    rf = rf_beamformer(beam) if isinstance(beam, BeamSelection) else np.asarray(beam)
    if rf.ndim == 1:
        rf = rf[:, None]
    if rf.shape[0] != geom.m:
        raise ValueError(f"RF matrix has {rf.shape[0]} rows, geometry has {geom.m} elements")
    if not is_orthonormal(rf):
        raise ValueError("projection gain needs an RF matrix with orthonormal columns")
    a = steering_vector(geom, direction_from_angles(theta, psi), f / fc)
    return float(np.linalg.norm(rf.conj().T @ a) / np.sqrt(geom.m))


def design_ab_hbf(
    H: np.ndarray,
    selection: BeamSelection,
    N_D: int,
    power_mode: str = "equal",
    snr: float | None = None,
    rf_mode: str = "carrier-flat",
    freq_ratios: Sequence[float] | None = None,
) -> HybridPrecoder:
    """Full AB-HBF precoder for channels ``H`` of shape (K, M_R, M_T)."""
    rf = rf_beamformer(selection, rf_mode, freq_ratios)
    bb = []
    for k, H_k in enumerate(H):
        rf_k = rf if rf.ndim == 2 else rf[k]
        bb.append(
            baseband_precoder(
                effective_channel(H_k, rf_k), N_D, power_mode, snr,
                rf=None if rf_mode == "carrier-flat" else rf_k,
            )
        )
    return HybridPrecoder(rf, np.stack(bb), selection)
