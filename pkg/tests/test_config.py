"""Config tree: strict merge, --set parsing, fingerprints, hydration."""

import json

import pytest

from necksense.config import (
    ENV_RUN_ROOT,
    apply_set,
    build_dataclass,
    config_fingerprint,
    default_config,
    load_config_file,
    merge_config,
    resolve_config,
    run_dir_for,
    run_root,
)
from necksense.detectors import DetectorSpec
from necksense.errors import ConfigError
from necksense.synthetic import CorpusConfig


def test_default_config_sections():
    cfg = default_config()
    assert set(cfg) >= {"run", "corpus", "facemap", "detect"}
    assert cfg["corpus"]["n_participants"] == 25
    assert cfg["detect"]["spec"]["arch"] == "gru_fcn"
    assert cfg["detect"]["windowing"]["stride_train"] == 3
    assert cfg["detect"]["windowing"]["stride_eval"] == 5


def test_merge_rejects_unknown_key():
    cfg = default_config()
    with pytest.raises(ConfigError) as err:
        merge_config(cfg, {"detect": {"specs": {"arch": "lstm"}}})
    assert "detect.specs" in str(err.value)


def test_merge_rejects_type_mismatch():
    cfg = default_config()
    with pytest.raises(ConfigError):
        merge_config(cfg, {"corpus": {"n_participants": "lots"}})
    # bool is not an int
    with pytest.raises(ConfigError):
        merge_config(cfg, {"corpus": {"n_participants": True}})
    # int where float expected is fine
    merged = merge_config(cfg, {"corpus": {"calibration_s": 60}})
    assert merged["corpus"]["calibration_s"] == 60


def test_merge_does_not_mutate_base():
    cfg = default_config()
    merge_config(cfg, {"corpus": {"seed": 99}})
    assert cfg["corpus"]["seed"] == default_config()["corpus"]["seed"]


def test_apply_set_parses_values():
    cfg = default_config()
    cfg = apply_set(cfg, ["corpus.seed=41"])
    assert cfg["corpus"]["seed"] == 41
    cfg = apply_set(cfg, ["detect.pca.enabled=true"])
    assert cfg["detect"]["pca"]["enabled"] is True
    cfg = apply_set(cfg, ["corpus.duration_scale=0.5"])
    assert cfg["corpus"]["duration_scale"] == 0.5
    cfg = apply_set(cfg, ["detect.dataset=open"])
    assert cfg["detect"]["dataset"] == "open"
    cfg = apply_set(cfg, ["detect.budgets=0.05,0.15"])
    assert cfg["detect"]["budgets"] == [0.05, 0.15]
    # scalar into a list-typed field is wrapped
    cfg = apply_set(cfg, ["detect.sweep_participants=P03"])
    assert cfg["detect"]["sweep_participants"] == ["P03"]


def test_apply_set_errors():
    cfg = default_config()
    with pytest.raises(ConfigError):
        apply_set(cfg, ["corpus.seed"])  # no '='
    with pytest.raises(ConfigError):
        apply_set(cfg, ["corpus.bogus=1"])
    with pytest.raises(ConfigError):
        apply_set(cfg, ["detect=everything"])  # section, not a leaf


def test_load_config_file(tmp_path):
    doc = {"corpus": {"n_participants": 3}}
    yaml_path = tmp_path / "c.yaml"
    yaml_path.write_text("corpus:\n  n_participants: 3\n")
    json_path = tmp_path / "c.json"
    json_path.write_text(json.dumps(doc))
    assert load_config_file(yaml_path)["corpus"]["n_participants"] == 3
    assert load_config_file(json_path)["corpus"]["n_participants"] == 3
    bad = tmp_path / "c.ini"
    bad.write_text("x=1")
    with pytest.raises(ConfigError):
        load_config_file(bad)
    with pytest.raises(ConfigError):
        load_config_file(tmp_path / "missing.yaml")


def test_resolve_config_layering(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("corpus:\n  seed: 5\n  n_participants: 4\n")
    cfg = resolve_config(str(path), ["corpus.seed=6"])
    assert cfg["corpus"]["seed"] == 6  # --set wins over file
    assert cfg["corpus"]["n_participants"] == 4  # file wins over default
    assert cfg["corpus"]["fps"] == 12  # default survives


def test_fingerprint_sensitivity():
    a = default_config()
    b = apply_set(default_config(), ["corpus.seed=123"])
    assert config_fingerprint(a) == config_fingerprint(default_config())
    assert config_fingerprint(a) != config_fingerprint(b)
    assert len(config_fingerprint(a)) == 16


def test_build_dataclass_hydration():
    section = default_config()["corpus"]
    section = dict(section)
    section.pop("out", None)
    cfg = build_dataclass(CorpusConfig, section)
    assert isinstance(cfg, CorpusConfig)
    assert cfg.n_channels_range == (3, 8)  # list from config becomes tuple
    spec = build_dataclass(DetectorSpec, {"arch": "lstm", "hidden": 16})
    assert spec.arch == "lstm"
    assert spec.hidden == 16
    with pytest.raises(ConfigError):
        build_dataclass(DetectorSpec, {"arch": "lstm", "warmth": 1})


def test_run_root_env_override(tmp_path, monkeypatch):
    cfg = default_config()
    monkeypatch.delenv(ENV_RUN_ROOT, raising=False)
    assert str(run_root(cfg)) == "runs"
    monkeypatch.setenv(ENV_RUN_ROOT, str(tmp_path / "elsewhere"))
    assert run_root(cfg) == tmp_path / "elsewhere"
    d = run_dir_for(cfg, "detect-train")
    assert d.parent == tmp_path / "elsewhere"
    assert d.name.startswith("detect-train-")
    named = apply_set(cfg, ["run.id=exp9"])
    assert run_dir_for(named, "detect-train").name == "exp9"
