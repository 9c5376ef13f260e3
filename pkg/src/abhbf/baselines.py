"""Reference precoders: fully digital SVD, narrowband matched beam, and
spatially sparse OMP precoding designed at the carrier."""

from __future__ import annotations

import numpy as np

from .beamsplit import matched_beamformer
from .channel import PathParams
from .geometry import UraGeometry, direction_from_angles
from .hbf import baseband_precoder, phase_fixed_svd


def fully_digital_precoder(
    H: np.ndarray, N_D: int, snr: float | None = None, power_mode: str = "equal"
) -> np.ndarray:
    """Top-N_D right singular vectors of ``H`` with the baseband power rule, shape (M_T, N_D)."""
    return baseband_precoder(H, N_D, power_mode, snr)


def conventional_narrowband_beamformer(dominant_path, geom: UraGeometry) -> np.ndarray:
    """Beam matched to the dominant AoD at the carrier, scaled by ``1/m``.

    ``dominant_path`` is a :class:`PathParams` or a ``(theta, psi)`` pair. The
    same vector is applied on every subcarrier.
    """
    if isinstance(dominant_path, PathParams):
        theta, psi = dominant_path.theta_t, dominant_path.psi_t
    else:
        theta, psi = dominant_path
    return matched_beamformer(geom, direction_from_angles(theta, psi))


def spatially_sparse_omp(
    H_fc: np.ndarray,
    dictionary: np.ndarray,
    n_rf: int,
    N_D: int,
    return_details: bool = False,
):
    """Orthogonal matching pursuit approximation of the optimal carrier precoder.

    Parameters
    ----------
    H_fc : numpy.ndarray
        Channel at the carrier, (M_R, M_T).
    dictionary : numpy.ndarray
        Candidate RF columns, (M_T, n_atoms); normalized to unit norm here.
    n_rf : int
        Number of RF chains, i.e. OMP iterations.
    N_D : int
        Number of streams.
    return_details : bool
        Also return the chosen dictionary indices and the residual Frobenius
        norm after each iteration.

    Returns
    -------
    rf : numpy.ndarray
        (M_T, n_rf) selected unit-norm dictionary columns.
    baseband : numpy.ndarray
        (n_rf, N_D), scaled so that ``||rf @ baseband||_F**2 = N_D``.
    indices, residual_norms : list
        Only with ``return_details``.
    """
    n_atoms = dictionary.shape[1]
    if n_rf < N_D:
        raise ValueError(f"n_rf={n_rf} must be at least N_D={N_D}")
    if n_rf > n_atoms:
        raise ValueError(f"n_rf={n_rf} exceeds the dictionary size {n_atoms}")
    A = dictionary / np.linalg.norm(dictionary, axis=0)
    _, _, Vh = phase_fixed_svd(H_fc)
    F_opt = Vh.conj().T[:, :N_D]

    indices: list[int] = []
    residual_norms: list[float] = []
    residual = F_opt
    baseband = np.zeros((0, N_D), dtype=complex)
    for _ in range(n_rf):
        energy = np.sum(np.abs(A.conj().T @ residual) ** 2, axis=1)
        energy[indices] = -1.0  # never pick an atom twice
        indices.append(int(np.argmax(energy)))
        rf = A[:, indices]
        baseband = np.linalg.lstsq(rf, F_opt, rcond=None)[0]
        residual = F_opt - rf @ baseband
        residual_norms.append(float(np.linalg.norm(residual)))

    rf = A[:, indices]
    total = np.linalg.norm(rf @ baseband)
    if total > 0:
        baseband = baseband * (np.sqrt(N_D) / total)
    if return_details:
        return rf, baseband, indices, residual_norms
    return rf, baseband
