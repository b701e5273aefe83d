from pathlib import Path

import pytest

from dumbbell_lab.config import TIERS, TierName, apply_overrides, load_config, parse_config
from dumbbell_lab.errors import ConfigurationError

REPO_CONFIG = Path(__file__).resolve().parents[1] / "dumbbell.config.yaml"


def test_repository_config_loads():
    config = load_config(REPO_CONFIG)
    assert config.N == 3
    assert config.eps_ladder == sorted(config.eps_ladder, reverse=True)
    assert config.weight.to_weight().validate_support() == []


def test_defaults():
    config = parse_config(None)
    assert config.tier is TierName.default
    assert config.mesh_tier is TIERS[TierName.default]
    assert config.smallest_eps == 0.02
    assert config.sampling.lambda_window(0.02) == (0.08, 0.2)
    assert config.serial is False


def test_dumbbell_spec_follows_the_tier():
    config = parse_config({"tier": "tiny", "eps_ladder": [0.1]})
    spec = config.dumbbell_spec(0.1)
    assert spec.eps == 0.1
    assert spec.n_phi == TIERS[TierName.tiny].n_phi
    assert config.model_mesh_kwargs()["tube_dz"] == TIERS[TierName.tiny].model_tube_dz


def test_overrides_are_revalidated(tmp_path):
    config = apply_overrides(parse_config(None), eps=[0.1, 0.05], tier="tiny", out=tmp_path, serial=True)
    assert config.eps_ladder == [0.1, 0.05]
    assert config.tier is TierName.tiny
    assert config.output_dir == tmp_path
    assert config.serial is True
    with pytest.raises(ConfigurationError):
        apply_overrides(config, eps=[0.05, 0.1])


def test_snapshot_is_json_ready(tiny_config):
    snapshot = tiny_config.snapshot()
    assert snapshot["tier"] == "tiny"
    assert isinstance(snapshot["output_dir"], str)
    assert parse_config(snapshot) == tiny_config


@pytest.mark.parametrize(
    "raw",
    [
        {"eps_ladder": []},
        {"eps_ladder": [0.6]},
        {"eps_ladder": [0.05, 0.1]},
        {"N": 2},
        {"tier": "huge"},
        {"unknown": 1},
        {"sampling": {"left_r": [0.5]}},
        {"weight": {"bumps": [{"center": 0.75, "radius": 0.5, "amplitude": 1.0}]}},
        {"weight": {"bumps": [{"center": -4.0, "radius": 1.0, "amplitude": 1.0}]}},
    ],
)
def test_invalid_configs(raw):
    with pytest.raises(ConfigurationError):
        parse_config(raw)


def test_invalid_weight_lists_the_violation():
    with pytest.raises(ConfigurationError, match="strip"):
        parse_config({"weight": {"bumps": [{"center": 6.0, "radius": 1.5, "amplitude": 1.0}, {"center": 0.75, "radius": 0.5, "amplitude": 1.0}]}})


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_config(tmp_path / "absent.yaml")


def test_empty_file_gives_defaults(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("", encoding="utf-8")
    assert load_config(path) == parse_config(None)


@pytest.mark.parametrize("text", ["eps_ladder: [0.1\n", "- 0.1\n- 0.2\n"])
def test_malformed_files(tmp_path, text):
    path = tmp_path / "bad.yaml"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ConfigurationError):
        load_config(path)
