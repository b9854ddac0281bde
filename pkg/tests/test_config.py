import math
from pathlib import Path

import pytest

from squeezelab.config import load_config, parse_complex, parse_config
from squeezelab.errors import ConfigError

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def base():
    return {"model": {"name": "reference", "params": {"omega": 1.0, "g": 1.0, "c": 2.0}},
            "scenario": {"t_star": 1.0, "beta": "1.0,0.5"}}


def test_parse_complex():
    assert parse_complex("1.5,-2") == 1.5 - 2j
    assert parse_complex("0.25") == 0.25
    assert parse_complex(3) == 3
    with pytest.raises(ConfigError):
        parse_complex("1,2,3")
    with pytest.raises(ConfigError):
        parse_complex("a,b")


def test_shipped_configs_load():
    for path in CONFIGS.glob("*.toml"):
        cfg = load_config(path)
        assert len(cfg.sha256) == 64
        cfg.build_model()


def test_defaults():
    cfg = parse_config(base())
    assert cfg.beta == 1 + 0.5j
    assert cfg.split == "example_symmetric"
    assert cfg.rel_tol == 1e-10 and cfg.epsilon == 1e-3
    assert cfg.time_window(cfg.build_model()) == (1e-3, 2.0)


def test_squeezing_inherits_t_star():
    data = base()
    data["model"] = {"name": "squeezing", "params": {"s0": 2.0}}
    data["scenario"]["t_star"] = 0.8
    assert parse_config(data).model_params["t_star"] == 0.8


@pytest.mark.parametrize("section,key", [("scenario", "t_star"), ("model", "name")])
def test_missing_key_is_named(section, key):
    data = base()
    del data[section][key]
    with pytest.raises(ConfigError, match=f"'{section}.{key}'"):
        parse_config(data)


@pytest.mark.parametrize("patch", [
    {"model": {"name": "nonsense"}},
    {"model": {"name": "reference", "params": {"gamma": 1.0}}},
    {"model": {"name": "reference", "params": {"g": "fast"}}},
    {"scenario": {"t_star": -1.0}},
    {"scenario": {"t_star": 1.0, "split": "diagonal"}},
    {"scenario": {"t_star": 1.0, "horizon": [1.5, 2.0]}},
    {"scenario": {"t_star": 1.0, "rel_tol": 1e-2}},
    {"scenario": {"t_star": 1.0, "beta": "x"}},
    {"entropy": {"epsilon": 0.0}},
    {"secure": {"eavesdrop_times": [1.0]}},
    {"secure": {"eavesdrop_times": [5.0]}},
    {"oracle": {"N": 500}},
    {"oracle": {"N": 40.0}},
    {"oracle": {"dt": 0.5}},
    {"initial": {"kind": "cat"}},
])
def test_invalid_configs(patch):
    data = base()
    data.update(patch)
    with pytest.raises(ConfigError):
        parse_config(data)


def test_initial_states():
    data = base()
    cfg = parse_config(data)
    coeffs = cfg.build_model()
    data["initial"] = {"kind": "coherent", "alpha": "0.5,0"}
    s = parse_config(data).initial_state(coeffs)
    assert s.mean[0] == pytest.approx(math.sqrt(2) * 0.5)
    data["initial"] = {"kind": "gaussian", "mean": [0.0, 0.0], "cov": [[0.1, 0.0], [0.0, 0.1]]}
    with pytest.raises(ConfigError):
        parse_config(data).initial_state(coeffs)
    data["initial"] = {"kind": "thermal", "nbar": 1.0}
    assert parse_config(data).initial_state(coeffs).cov[0, 0] == pytest.approx(1.5)


def test_bad_toml(tmp_path):
    p = tmp_path / "bad.toml"
    p.write_text("[model\nname=")
    with pytest.raises(ConfigError):
        load_config(p)


def test_digest_tracks_bytes(tmp_path):
    src = (CONFIGS / "reference.toml").read_text()
    a, b = tmp_path / "a.toml", tmp_path / "b.toml"
    a.write_text(src)
    b.write_text(src + "\n# comment\n")
    assert load_config(a).sha256 != load_config(b).sha256
    assert load_config(a).sha256 == load_config(CONFIGS / "reference.toml").sha256
