"""Monte-Carlo experiment harness.

Each experiment produces one plot-ready data set. Trials are independent:
trial ``t`` draws from ``numpy.random.default_rng(seed + t)`` and reports
``seed + t`` as its seed, so a single trial can be replayed with
``--seed <that value> --trials 1``. Rows are merged in sort order, which makes
serial and threaded runs byte-identical.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Union

import numpy as np

from . import __version__
from .baselines import conventional_narrowband_beamformer, fully_digital_precoder, spatially_sparse_omp
from .beamsplit import gain_profile
from .channel import channel_matrix, path_gain, realize_channel, subcarrier_frequencies
from .config import ConfigError, ScenarioConfig
from .geometry import UraGeometry, quantized_grid
from .hbf import build_support, design_ab_hbf, select_angle_pairs
from .metrics import spectral_efficiency

EXPERIMENTS = ("gain-3d", "gain-spread", "gain-cuts", "rate-snr", "rate-antennas")


class Row(NamedTuple):
    scheme: str
    snr_db: Union[float, None]
    subcarrier: Union[int, str, None]
    metric: str
    value: float
    seed: int


@dataclass
class ResultTable:
    rows: list[Row] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def sorted_rows(self) -> list[Row]:
        def key(r: Row):
            snr = -math.inf if r.snr_db is None else r.snr_db
            if r.subcarrier is None:
                sub = (0, -1)
            elif r.subcarrier == "avg":
                sub = (2, 0)
            else:
                sub = (1, int(r.subcarrier))
            return (r.scheme, snr, sub, r.seed, r.metric)

        return sorted(self.rows, key=key)

    def select(self, **match) -> list[Row]:
        return [r for r in self.rows if all(getattr(r, k) == v for k, v in match.items())]


def trial_rng(cfg: ScenarioConfig, trial: int) -> tuple[int, np.random.Generator]:
    seed = (cfg.seed + trial) % 2**64
    return seed, np.random.default_rng(seed)


def _reference_gain(cfg: ScenarioConfig) -> float:
    return path_gain(cfg.fc, cfg.d_T, cfg.absorption) if cfg.normalize_pathloss else 1.0


def beam_selection(cfg: ScenarioConfig, geom: UraGeometry | None = None, spreads=None):
    """AB-HBF beams from the configured nominal AoDs and spreads."""
    geom = geom or cfg.tx_geometry
    support = build_support(
        cfg.aod_centers, cfg.aod_spreads if spreads is None else spreads, cfg.support_mode
    )
    selection = select_angle_pairs(support, quantized_grid(geom), cfg.max_beams)
    if selection.n_t < cfg.N_D:
        raise ConfigError(
            f"N_D: {cfg.N_D} streams exceed the {selection.n_t} RF chains selected "
            f"for tx_geometry {geom.m_x}x{geom.m_y}"
        )
    return selection


def sparse_rf_chains(cfg: ScenarioConfig, n_t: int) -> int:
    """RF chains of the sparse baseline: N_D by default, AB-HBF's N_T with ``"n_t"``."""
    if cfg.sparse_n_rf is None:
        return cfg.N_D
    if cfg.sparse_n_rf == "n_t":
        return n_t
    return int(cfg.sparse_n_rf)


def _rates(cfg: ScenarioConfig, geom: UraGeometry, trial: int):
    """Per-scheme, per-SNR mean rates for one trial on transmit array ``geom``."""
    seed, rng = trial_rng(cfg, trial)
    scen = replace(cfg, tx_geometry=geom)
    ch = realize_channel(scen, rng)
    ref = _reference_gain(cfg)
    H = ch.matrices / ref
    ratios = ch.frequencies / cfg.fc
    selection = beam_selection(cfg, geom)
    n_rf = sparse_rf_chains(cfg, selection.n_t)

    out: dict[str, dict[float, float]] = {s: {} for s in cfg.schemes}
    sparse = None
    if "sparse" in cfg.schemes:
        if n_rf > geom.m:
            raise ConfigError(f"sparse_n_rf: {n_rf} exceeds the {geom.m} dictionary beams")
        H_fc = channel_matrix(ch.paths, geom, cfg.rx_geometry, cfg.fc, cfg.fc, cfg.absorption) / ref
        sparse = spatially_sparse_omp(H_fc, quantized_grid(geom).steering_matrix(), n_rf, cfg.N_D)
    if "conventional" in cfg.schemes:
        w = conventional_narrowband_beamformer(ch.paths[0], geom) * np.sqrt(geom.m)

    hbf = None
    for snr_db in cfg.snr_list:
        snr = 10 ** (snr_db / 10)
        for scheme in cfg.schemes:
            if scheme == "ab-hbf":
                if hbf is None or cfg.power_mode == "waterfilling":
                    hbf = design_ab_hbf(H, selection, cfg.N_D, cfg.power_mode, snr, cfg.rf_mode, ratios)
                rate = spectral_efficiency(H, hbf.rf, hbf.baseband, snr, cfg.N_D)
            elif scheme == "fully-digital":
                F = np.stack([fully_digital_precoder(H_k, cfg.N_D, snr, cfg.power_mode) for H_k in H])
                rate = spectral_efficiency(H, None, F, snr, cfg.N_D)
            elif scheme == "sparse":
                rate = spectral_efficiency(H, sparse[0], sparse[1], snr, cfg.N_D)
            else:
                rate = spectral_efficiency(H, None, w[:, None], snr, 1)
            out[scheme][snr_db] = rate
    return seed, ch, selection, n_rf, out


def _rate_snr_trial(cfg: ScenarioConfig, trial: int):
    seed, ch, selection, n_rf, rates = _rates(cfg, cfg.tx_geometry, trial)
    rows = [
        Row(scheme, float(snr_db), "avg", "rate", value, seed)
        for scheme, by_snr in rates.items()
        for snr_db, value in by_snr.items()
    ]
    los = ch.paths[0]
    geom = cfg.tx_geometry
    if "ab-hbf" in cfg.schemes:
        g = gain_profile(selection, geom, los.theta_t, los.psi_t, ch.frequencies, cfg.fc)
        rows += [Row("ab-hbf", None, k, "gain", float(v), seed) for k, v in enumerate(g)]
    if "conventional" in cfg.schemes:
        w = conventional_narrowband_beamformer(los, geom)
        g = gain_profile(w, geom, los.theta_t, los.psi_t, ch.frequencies, cfg.fc)
        rows += [Row("conventional", None, k, "gain", float(v), seed) for k, v in enumerate(g)]
    meta = {"seed": seed, "n_t": selection.n_t, "sparse_n_rf": n_rf if "sparse" in cfg.schemes else None}
    return rows, meta


def _rate_antennas_trial(cfg: ScenarioConfig, trial: int):
    rows, meta = [], {}
    for mx, my in cfg.tx_sizes:
        seed, _, selection, n_rf, rates = _rates(cfg, UraGeometry(mx, my), trial)
        metric = f"rate_mt={mx * my}"
        rows += [
            Row(scheme, float(snr_db), "avg", metric, value, seed)
            for scheme, by_snr in rates.items()
            for snr_db, value in by_snr.items()
        ]
        meta["seed"] = seed
        meta[f"n_t_mt={mx * my}"] = selection.n_t
        meta[f"sparse_n_rf_mt={mx * my}"] = n_rf if "sparse" in cfg.schemes else None
    return rows, meta


def _angle_sweep(center: float, spread: float, points: int) -> np.ndarray:
    return center + spread * (np.linspace(-1.0, 1.0, points) if points > 1 else np.zeros(1))


def _gain_3d_trial(cfg: ScenarioConfig, trial: int):
    """Gain over subcarriers x elevation offsets toward the LoS path (conventional vs AB-HBF)."""
    seed, rng = trial_rng(cfg, trial)
    ch = realize_channel(cfg, rng)
    los = ch.paths[0]
    geom = cfg.tx_geometry
    selection = beam_selection(cfg)
    w = conventional_narrowband_beamformer(los, geom)
    rows = []
    thetas = _angle_sweep(cfg.aod_centers[0][0], cfg.aod_spreads[0][0], cfg.angle_points)
    for theta in thetas:
        metric = f"gain_theta_deg={math.degrees(theta):.4f}"
        beams = []
        if "conventional" in cfg.schemes:
            beams.append(("conventional", w))
        if "ab-hbf" in cfg.schemes:
            beams.append(("ab-hbf", selection))
        for scheme, beam in beams:
            g = gain_profile(beam, geom, theta, los.psi_t, ch.frequencies, cfg.fc)
            rows += [Row(scheme, None, k, metric, float(v), seed) for k, v in enumerate(g)]
    return rows, {"seed": seed, "n_t": selection.n_t}


def _gain_spread_trial(cfg: ScenarioConfig, trial: int):
    """AB-HBF gain toward the LoS path for every spread in ``spread_list``."""
    seed, rng = trial_rng(cfg, trial)
    ch = realize_channel(cfg, rng)
    los = ch.paths[0]
    rows, meta = [], {"seed": seed}
    for spread in cfg.spread_list:
        selection = beam_selection(cfg, spreads=((spread, spread),) * cfg.L)
        g = gain_profile(selection, cfg.tx_geometry, los.theta_t, los.psi_t, ch.frequencies, cfg.fc)
        metric = f"gain_spread_deg={math.degrees(spread):.4f}"
        rows += [Row("ab-hbf", None, k, metric, float(v), seed) for k, v in enumerate(g)]
        meta[f"n_t_spread_deg={math.degrees(spread):.4f}"] = selection.n_t
    return rows, meta


def _gain_cuts_trial(cfg: ScenarioConfig, trial: int):
    """AB-HBF gain per subcarrier along elevation and azimuth cuts through the nominal LoS AoD."""
    seed = (cfg.seed + trial) % 2**64
    freqs = subcarrier_frequencies(cfg.fc, cfg.bandwidth, cfg.K)
    geom = cfg.tx_geometry
    selection = beam_selection(cfg)
    (theta0, psi0), (d_theta, d_psi) = cfg.aod_centers[0], cfg.aod_spreads[0]
    rows = []
    for theta in _angle_sweep(theta0, d_theta, cfg.angle_points):
        g = gain_profile(selection, geom, theta, psi0, freqs, cfg.fc)
        metric = f"gain_theta_deg={math.degrees(theta):.4f}"
        rows += [Row("ab-hbf", None, k, metric, float(v), seed) for k, v in enumerate(g)]
    for psi in _angle_sweep(psi0, d_psi, cfg.angle_points):
        g = gain_profile(selection, geom, theta0, psi, freqs, cfg.fc)
        metric = f"gain_psi_deg={math.degrees(psi):.4f}"
        rows += [Row("ab-hbf", None, k, metric, float(v), seed) for k, v in enumerate(g)]
    return rows, {"seed": seed, "n_t": selection.n_t}


_TRIALS = {
    "rate-snr": _rate_snr_trial,
    "rate-antennas": _rate_antennas_trial,
    "gain-3d": _gain_3d_trial,
    "gain-spread": _gain_spread_trial,
    "gain-cuts": _gain_cuts_trial,
}


def run_experiment(config: ScenarioConfig, experiment: str = "rate-snr", threads: int = 1) -> ResultTable:
    """Run every trial of ``experiment`` and collect the rows and run metadata.

    ``gain-cuts`` is deterministic and always runs a single trial.
    """
    if experiment not in _TRIALS:
        raise ValueError(f"unknown experiment {experiment!r}; expected one of {EXPERIMENTS}")
    fn = _TRIALS[experiment]
    trials = 1 if experiment == "gain-cuts" else config.trials
    if threads > 1 and trials > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda t: fn(config, t), range(trials)))
    else:
        results = [fn(config, t) for t in range(trials)]

    table = ResultTable()
    for rows, _ in results:
        table.rows.extend(rows)
    table.rows = table.sorted_rows()
    table.metadata = {
        "experiment": experiment,
        "config_hash": config.digest(),
        "config": config.to_dict(),
        "tool_version": __version__,
        "trials": [meta for _, meta in results],
    }
    return table
