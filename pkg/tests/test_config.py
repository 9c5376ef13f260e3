import json
import math

import pytest

from abhbf.channel import AbsorptionModel
from abhbf.config import (
    FIELD_NAMES,
    ConfigError,
    ScenarioConfig,
    config_from_dict,
    load_config,
    paper_profile,
)
from abhbf.geometry import UraGeometry


def test_defaults_are_desk_profile():
    cfg = ScenarioConfig()
    assert cfg.tx_geometry == UraGeometry(16, 16) and cfg.K == 32 and cfg.trials == 20
    assert cfg.fc == 300e9 and cfg.bandwidth == 30e9 and cfg.L == 4 and cfg.N_D == 4
    assert cfg.aod_spreads[0] == (math.radians(10), math.radians(10))


def test_paper_profile():
    cfg = paper_profile()
    assert cfg.tx_geometry.m == 1024 and cfg.K == 128


def test_round_trip_dict():
    cfg = ScenarioConfig(seed=7, power_mode="equal", absorption=AbsorptionModel(table=((1e11, 0.1), (4e11, 0.3))))
    assert config_from_dict(cfg.to_dict()) == cfg
    assert config_from_dict(json.loads(json.dumps(cfg.to_dict()))).digest() == cfg.digest()
    assert set(cfg.to_dict()) == set(FIELD_NAMES)


def test_degrees_in_file():
    d = ScenarioConfig().to_dict()
    assert d["aod_centers"][0] == [45.0, 0.0]
    assert d["aod_spreads"][1] == [10.0, 10.0]
    assert d["spread_list"] == [2.0, 10.0]


def test_spread_shorthands():
    a = config_from_dict({"aod_spreads": 5})
    b = config_from_dict({"aod_spreads": [5, 5]})
    c = config_from_dict({"aod_spreads": [[5, 5]] * 4})
    assert a == b == c
    assert a.aod_spreads[2] == (math.radians(5), math.radians(5))


def test_with_spread():
    cfg = ScenarioConfig().with_spread(math.radians(2))
    assert all(s == (math.radians(2),) * 2 for s in cfg.aod_spreads + cfg.aoa_spreads)
    assert cfg.digest() != ScenarioConfig().digest()


@pytest.mark.parametrize(
    "data,field",
    [
        ({"bogus": 1}, "bogus"),
        ({"N_D": 5}, "N_D"),
        ({"K": 0}, "K"),
        ({"power_mode": "max"}, "power_mode"),
        ({"aod_centers": [[1, 2]]}, "aod_centers"),
        ({"L": 2}, "aod_centers"),
        ({"schemes": ["magic"]}, "schemes"),
        ({"tx_geometry": [0, 4]}, "tx_geometry"),
        ({"max_beams": 2}, "max_beams"),
        ({"sparse_n_rf": 2}, "sparse_n_rf"),
        ({"absorption": -1}, "absorption"),
        ({"aod_spreads": -1}, "aod_spreads"),
    ],
)
def test_errors_name_field(data, field):
    with pytest.raises(ConfigError, match=field):
        config_from_dict(data)


def test_load_config(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"K": 8, "seed": 3}))
    cfg = load_config(p)
    assert cfg.K == 8 and cfg.seed == 3
    p.write_text("{not json")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_config(p)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")


@pytest.mark.parametrize("name", ["desk.json", "paper.json"])
def test_shipped_configs(name):
    from pathlib import Path

    cfg = load_config(Path(__file__).parent.parent / "configs" / name)
    expected = ScenarioConfig() if name == "desk.json" else paper_profile()
    assert cfg == expected
