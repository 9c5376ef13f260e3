"""Achievable rate and received-signal simulation for the precoded OFDM link.

Noise variance is fixed to 1, so the linear ``snr`` equals the transmit power
``rho``. Optimal receive processing is implicit in the log-det rate.
"""

from __future__ import annotations

import numpy as np

POWER_TOL = 1e-6


class PowerConstraintError(ValueError):
    """A precoder uses more than the N_D power budget."""


def _precoders(rf, baseband) -> np.ndarray:
    baseband = np.asarray(baseband)
    if rf is None:
        return baseband
    return np.matmul(rf, baseband)


def spectral_efficiency(
    H_list, rf, baseband_list, snr_linear: float, N_D: int, per_subcarrier: bool = False
):
    """Mean over subcarriers of ``log2 det(I + snr/N_D H_k F_k B_k B_k^H F_k^H H_k^H)``.

    Parameters
    ----------
    H_list : array_like
        Channels, (K, M_R, M_T).
    rf : array_like or None
        RF matrix (M_T, N_T), per-subcarrier RF (K, M_T, N_T), or None when
        ``baseband_list`` already holds full digital precoders.
    baseband_list : array_like
        (K, N_T, N_D) baseband precoders (or (K, M_T, N_D) with ``rf=None``).
    snr_linear : float
        ``rho / sigma**2``.
    N_D : int
        Number of streams; the per-stream power scale is ``1/N_D``.
    per_subcarrier : bool
        Return the K per-subcarrier rates instead of their mean.

    Raises
    ------
    PowerConstraintError
        If some ``||F_k B_k||_F**2`` exceeds N_D by more than 1e-6.
    """
    H = np.asarray(H_list)
    F = _precoders(rf, baseband_list)
    if F.ndim == 2:
        F = np.broadcast_to(F, (H.shape[0],) + F.shape)
    power = np.sum(np.abs(F) ** 2, axis=(-2, -1))
    if np.any(power > N_D + POWER_TOL):
        k = int(np.argmax(power))
        raise PowerConstraintError(
            f"precoder power {power[k]:.9g} exceeds the budget N_D={N_D} at subcarrier {k}"
        )
    G = np.matmul(H, F)
    gram = np.matmul(np.conj(np.swapaxes(G, -1, -2)), G)
    eig = np.clip(np.linalg.eigvalsh(gram), 0.0, None)
    rates = np.sum(np.log1p(snr_linear / N_D * eig), axis=-1) / np.log(2)
    return rates if per_subcarrier else float(np.mean(rates))


def simulate_ofdm_symbol(
    H: np.ndarray,
    rf,
    baseband: np.ndarray,
    data: np.ndarray,
    snr_linear: float,
    rng: np.random.Generator | None = None,
    noiseless: bool = False,
) -> np.ndarray:
    """Received vector ``sqrt(rho) H F B d + n`` with unit-variance CN noise."""
    F = baseband if rf is None else rf @ baseband
    y = np.sqrt(snr_linear) * (H @ (F @ np.asarray(data)))
    if noiseless:
        return y
    if rng is None:
        raise ValueError("a random generator is required unless noiseless=True")
    n = (rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape)) / np.sqrt(2)
    return y + n
