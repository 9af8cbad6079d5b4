import json

import pytest

from src.akhiezer.errors import ConfigError
from src.config import DEFAULT_ALPHAS, DEFAULT_BETAS, RunConfig, load_config


def test_defaults_use_two_band_example() -> None:
    config = load_config()
    assert config.alphas == DEFAULT_ALPHAS
    assert config.betas == DEFAULT_BETAS
    assert config.command == "verify"
    assert config.n_max >= 1


def test_overrides_skip_none(tmp_path) -> None:
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"alphas": [], "betas": [-1, 1], "n_max": 4}), encoding="utf-8")
    config = load_config(str(path), {"n_max": None, "order": 80, "command": "compute"})
    assert config.n_max == 4
    assert config.order == 80
    assert config.command == "compute"


def test_missing_betas_is_config_error(tmp_path) -> None:
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"alphas": []}), encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_unreadable_and_non_object_documents(tmp_path) -> None:
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(bad))
    listed = tmp_path / "list.json"
    listed.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(listed))


def test_rejects_non_positive_tolerances(tmp_path) -> None:
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"alphas": [], "betas": [-1, 1], "theta_tol": 0}), encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(path))
    path.write_text(json.dumps({"alphas": [], "betas": [-1, 1], "tolerances": {"freud": -1.0}}), encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_unknown_keys_rejected() -> None:
    with pytest.raises(ConfigError):
        load_config(None, {"colour": "blue"})


def test_tolerance_longest_prefix_wins() -> None:
    config = RunConfig(alphas=[], betas=[-1, 1], tolerances={"freud": 1e-4, "freud.shift": 1e-3})
    assert config.tolerance("freud.shift", 1e-8) == 1e-3
    assert config.tolerance("freud.determinant", 1e-8) == 1e-4
    assert config.tolerance("opoly.wronskian.n1", 1e-9) == 1e-9
