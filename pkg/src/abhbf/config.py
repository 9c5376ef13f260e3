"""Scenario configuration.

Config files are JSON objects whose keys are the :class:`ScenarioConfig`
field names. Angles are given in degrees in the file and stored in radians.
Unknown keys are rejected.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .channel import AbsorptionModel
from .geometry import UraGeometry
from .hbf import POWER_MODES, RF_MODES, SUPPORT_MODES

SCHEMES = ("ab-hbf", "fully-digital", "sparse", "conventional")

# Angle-valued fields: degrees in files, radians in memory.
_PER_PATH_ANGLES = ("aod_centers", "aod_spreads", "aoa_centers", "aoa_spreads")


class ConfigError(ValueError):
    """Invalid scenario configuration; the message names the offending field."""


def _deg_pairs(value, L, name):
    """Normalize a per-path angle spec to L (a, b) pairs in degrees."""
    if isinstance(value, (int, float)):
        return [(float(value), float(value))] * L
    if (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(x, (int, float)) for x in value)
        and name.endswith("spreads")
    ):
        return [(float(value[0]), float(value[1]))] * L
    try:
        pairs = [(float(a), float(b)) for a, b in value]
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected a list of [theta, psi] pairs in degrees") from None
    if len(pairs) != L:
        raise ConfigError(f"{name}: expected {L} entries (one per path), got {len(pairs)}")
    return pairs


def _rad(pairs):
    return tuple((math.radians(a), math.radians(b)) for a, b in pairs)


def _degrees(x: float) -> float:
    # 12 significant digits hide radian round-trip noise (30 -> 29.999999999999996)
    return float(format(math.degrees(x), ".12g"))


def _deg(pairs):
    return [[_degrees(a), _degrees(b)] for a, b in pairs]


DEFAULT_AOD_CENTERS = ((45.0, 0.0), (30.0, 120.0), (60.0, -60.0), (25.0, -150.0))
DEFAULT_AOA_CENTERS = ((40.0, 30.0), (25.0, -90.0), (55.0, 160.0), (35.0, -30.0))


@dataclass(frozen=True)
class ScenarioConfig:
    """Link-level scenario; defaults are the desk-scale profile."""

    fc: float = 300e9
    bandwidth: float = 30e9
    K: int = 32
    tx_geometry: UraGeometry = UraGeometry(16, 16)
    rx_geometry: UraGeometry = UraGeometry(2, 2)
    L: int = 4
    d_T: float = 10.0
    aod_centers: tuple = _rad(DEFAULT_AOD_CENTERS)
    aod_spreads: tuple = _rad([(10.0, 10.0)] * 4)
    aoa_centers: tuple = _rad(DEFAULT_AOA_CENTERS)
    aoa_spreads: tuple = _rad([(10.0, 10.0)] * 4)
    snr_list: tuple = (-10.0, -5.0, 0.0, 5.0, 10.0)
    N_D: int = 4
    power_mode: str = "waterfilling"
    rf_mode: str = "carrier-flat"
    support_mode: str = "union"
    max_beams: int | None = None
    trials: int = 20
    seed: int = 1
    absorption: AbsorptionModel = AbsorptionModel()
    delay_spread: float = 20e-9
    min_nlos_loss: float = 0.0316
    normalize_pathloss: bool = True
    schemes: tuple = ("ab-hbf", "fully-digital", "sparse")
    sparse_n_rf: int | str | None = None
    spread_list: tuple = (math.radians(2.0), math.radians(10.0))
    tx_sizes: tuple = ((4, 4), (8, 8), (16, 16))
    angle_points: int = 21

    def __post_init__(self):
        self.validate()

    def validate(self):
        def need(cond, name, msg):
            if not cond:
                raise ConfigError(f"{name}: {msg}")

        need(self.fc > 0, "fc", "must be positive")
        need(self.bandwidth >= 0, "bandwidth", "must be nonnegative")
        need(self.fc > self.bandwidth / 2, "bandwidth", "must be below 2*fc")
        need(int(self.K) == self.K and self.K >= 1, "K", "must be a positive integer")
        need(int(self.L) == self.L and self.L >= 1, "L", "must be a positive integer")
        need(self.d_T > 0, "d_T", "must be positive")
        for name in _PER_PATH_ANGLES:
            value = getattr(self, name)
            need(len(value) == self.L, name, f"expected {self.L} entries, got {len(value)}")
            if name.endswith("spreads"):
                need(all(a >= 0 and b >= 0 for a, b in value), name, "spreads must be >= 0")
        need(len(self.snr_list) >= 1, "snr_list", "needs at least one value")
        need(int(self.N_D) == self.N_D and self.N_D >= 1, "N_D", "must be a positive integer")
        need(self.N_D <= self.rx_geometry.m, "N_D", f"exceeds M_R={self.rx_geometry.m}")
        need(self.power_mode in POWER_MODES, "power_mode", f"must be one of {POWER_MODES}")
        need(self.rf_mode in RF_MODES, "rf_mode", f"must be one of {RF_MODES}")
        need(self.support_mode in SUPPORT_MODES, "support_mode", f"must be one of {SUPPORT_MODES}")
        need(
            self.max_beams is None or (int(self.max_beams) == self.max_beams and self.max_beams >= self.L),
            "max_beams", f"must be an integer >= L={self.L}",
        )
        need(int(self.trials) == self.trials and self.trials >= 1, "trials", "must be >= 1")
        need(int(self.seed) == self.seed and 0 <= self.seed < 2**64, "seed", "must be a 64-bit unsigned integer")
        need(self.delay_spread >= 0, "delay_spread", "must be nonnegative")
        need(0 < self.min_nlos_loss <= 1, "min_nlos_loss", "must lie in (0, 1]")
        need(len(self.schemes) >= 1, "schemes", "needs at least one scheme")
        unknown = [s for s in self.schemes if s not in SCHEMES]
        need(not unknown, "schemes", f"unknown {unknown}; choose from {SCHEMES}")
        need(
            self.sparse_n_rf in (None, "n_t")
            or (isinstance(self.sparse_n_rf, int) and self.sparse_n_rf >= self.N_D),
            "sparse_n_rf", f'must be null (= N_D), "n_t", or an integer >= N_D={self.N_D}',
        )
        need(all(s >= 0 for s in self.spread_list), "spread_list", "spreads must be >= 0")
        need(int(self.angle_points) == self.angle_points and self.angle_points >= 1, "angle_points", "must be >= 1")

    def with_spread(self, spread_rad: float) -> "ScenarioConfig":
        """Same scenario with every AoD and AoA spread set to ``spread_rad``."""
        s = ((spread_rad, spread_rad),) * self.L
        return replace(self, aod_spreads=s, aoa_spreads=s)

    def to_dict(self) -> dict:
        """JSON-ready dict in file units (degrees)."""
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name in _PER_PATH_ANGLES:
                value = _deg(value)
            elif f.name in ("tx_geometry", "rx_geometry"):
                value = [value.m_x, value.m_y]
            elif f.name == "absorption":
                value = [list(row) for row in value.table] if value.table else value.constant
            elif f.name == "spread_list":
                value = [_degrees(s) for s in value]
            elif f.name in ("snr_list", "schemes"):
                value = list(value)
            elif f.name == "tx_sizes":
                value = [list(t) for t in value]
            out[f.name] = value
        return out

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form."""
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


FIELD_NAMES = tuple(f.name for f in fields(ScenarioConfig))


def _geometry(value, name):
    try:
        mx, my = value
        return UraGeometry(mx, my)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: expected [m_x, m_y] positive integers ({exc})") from None


def config_from_dict(data: dict) -> ScenarioConfig:
    """Build a config from file-unit values; missing keys take the defaults."""
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be a JSON object")
    unknown = sorted(set(data) - set(FIELD_NAMES))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    kw = dict(data)
    defaults = ScenarioConfig()
    L = kw.get("L", defaults.L)
    if not isinstance(L, int) or isinstance(L, bool) or L < 1:
        raise ConfigError("L: must be a positive integer")
    for name in _PER_PATH_ANGLES:
        if name in kw:
            kw[name] = _rad(_deg_pairs(kw[name], L, name))
        elif L != defaults.L:
            if name.endswith("centers"):
                raise ConfigError(f"{name}: required when L differs from the default")
            kw[name] = getattr(defaults, name)[:1] * L
    for name in ("tx_geometry", "rx_geometry"):
        if name in kw:
            kw[name] = _geometry(kw[name], name)
    if "absorption" in kw:
        value = kw["absorption"]
        try:
            if value is None:
                kw["absorption"] = AbsorptionModel()
            elif isinstance(value, (int, float)):
                kw["absorption"] = AbsorptionModel(constant=float(value))
            else:
                kw["absorption"] = AbsorptionModel(table=tuple((float(f), float(c)) for f, c in value))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"absorption: {exc}") from None
    if "spread_list" in kw:
        kw["spread_list"] = tuple(math.radians(float(s)) for s in kw["spread_list"])
    for name in ("snr_list", "schemes"):
        if name in kw:
            kw[name] = tuple(kw[name])
    if "tx_sizes" in kw:
        kw["tx_sizes"] = tuple((int(a), int(b)) for a, b in kw["tx_sizes"])
        for size in kw["tx_sizes"]:
            _geometry(size, "tx_sizes")
    try:
        return ScenarioConfig(**kw)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config: {exc}") from None


def load_config(path) -> ScenarioConfig:
    """Read a JSON scenario file."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return config_from_dict(data)


def paper_profile() -> ScenarioConfig:
    """Full-size scenario: 32x32 transmit array, 128 subcarriers."""
    return ScenarioConfig(tx_geometry=UraGeometry(32, 32), K=128, tx_sizes=((4, 4), (8, 8), (16, 16), (32, 32)))
