"""Declarative run configuration: one nested document drives every stage.

The default document is derived from the library dataclasses so defaults
have a single home. Files (JSON or YAML) and ``--set key=value`` overrides
merge onto it strictly: a key that does not exist in the defaults is
rejected with its dotted path, and scalar overrides must keep the type of
the value they replace. The resolved document is fingerprinted and the
fingerprint is embedded in every report, so two runs with equal
fingerprints are comparable.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from pathlib import Path

from .detectors import DetectorSchedule, DetectorSpec
from .errors import ConfigError
from .facemap import FacemapConfig, FacemapSchedule
from .synthetic.corpus import CorpusConfig

ENV_RUN_ROOT = "NECKSENSE_RUN_ROOT"
SWEEP_BUDGETS_DEFAULT = [0.05, 0.15, 0.25, 0.35, 0.45]


def default_config() -> dict:
    """The full configuration document with library defaults filled in."""
    return {
        "run": {"root": "runs", "id": ""},
        "corpus": {
            **dataclasses.asdict(CorpusConfig()),
            "out": "data",
        },
        "facemap": {
            "model": dataclasses.asdict(FacemapConfig()),
            "schedule": dataclasses.asdict(FacemapSchedule()),
            "augment": {"enabled": True},  # stage-appropriate affine jitter
            "data": {
                "root": "data",
                "participants": [],  # empty = every participant found
                "frame_stride": 1,
                "max_frames": 0,  # 0 = no cap
            },
            "pretrain": {
                # disjoint synthetic cohort for the first training stage;
                # height/width 0 = render at the model's native tile size
                "n_participants": 6,
                "seed": 1009,
                "duration_s": 60.0,
                "fps": 12,
                "height": 0,
                "width": 0,
            },
            "checkpoints": {"pretrain": "", "finetune": ""},
            "n_folds": 5,
            "reconstruct": {"batch_size": 32},
        },
        "detect": {
            "data_root": "data",
            "dataset": "neck",
            "spec": dataclasses.asdict(DetectorSpec()),
            "schedule": dataclasses.asdict(DetectorSchedule()),
            "windowing": {"stride_train": 3, "stride_eval": 5},
            "pca": {"enabled": False, "var_threshold": 0.95},
            "margin_k": 0,
            "grid": [],
            "n_folds": 5,
            "seed": 0,
            "budgets": list(SWEEP_BUDGETS_DEFAULT),
            "sweep_participants": [],
            "transfer": {"source": "neck", "target": "open"},
            "finetune_schedule": dataclasses.asdict(DetectorSchedule()),
            "single_fold": False,  # frame-arch selection on one fold only
            "checkpoint": "",
            "eval_participants": [],
        },
    }


# ---------------------------------------------------------------------------
# strict merging


def _type_ok(base, value) -> bool:
    if base is None:
        return True
    if isinstance(base, bool):
        return isinstance(value, bool)
    if isinstance(base, float):
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if isinstance(base, int):
        return isinstance(value, int) and not isinstance(value, bool)
    if isinstance(base, str):
        return isinstance(value, str)
    if isinstance(base, (list, tuple)):
        return isinstance(value, (list, tuple))
    return isinstance(value, type(base))


def merge_config(base: dict, override: dict, _path: str = "") -> dict:
    """Recursively merge, rejecting keys absent from ``base``."""
    out = dict(base)
    for key, value in override.items():
        path = f"{_path}.{key}" if _path else str(key)
        if key not in base:
            raise ConfigError(f"unknown config key: {path}")
        current = base[key]
        if isinstance(current, dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{path} must be a mapping")
            out[key] = merge_config(current, value, path)
        else:
            if isinstance(value, dict):
                raise ConfigError(f"{path} is a value, not a section")
            if not _type_ok(current, value):
                raise ConfigError(
                    f"{path}: expected {type(current).__name__}, "
                    f"got {type(value).__name__}"
                )
            out[key] = list(value) if isinstance(value, tuple) else value
    return out


def load_config_file(path: str | Path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text()
    if path.suffix in (".yaml", ".yml"):
        try:
            import yaml
        except ImportError as exc:  # pragma: no cover
            raise ConfigError("YAML config requires the pyyaml package") from exc
        try:
            doc = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
    elif path.suffix == ".json":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
    else:
        raise ConfigError(
            f"unsupported config extension {path.suffix!r} (use .json, .yaml, .yml)"
        )
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError(f"{path} must contain a mapping at the top level")
    return doc


def _parse_value(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        pass
    if "," in raw:
        return [_parse_value(part.strip()) for part in raw.split(",")]
    return raw


def apply_set(config: dict, exprs) -> dict:
    """Apply ``key.path=value`` overrides onto an already-merged document."""
    out = json.loads(json.dumps(config))  # deep copy, normalizes tuples
    for expr in exprs:
        if "=" not in expr:
            raise ConfigError(f"--set needs key=value, got {expr!r}")
        dotted, raw = expr.split("=", 1)
        keys = [k for k in dotted.strip().split(".") if k]
        if not keys:
            raise ConfigError(f"--set needs a key path, got {expr!r}")
        node = out
        for k in keys[:-1]:
            if not isinstance(node, dict) or k not in node:
                raise ConfigError(f"unknown config key: {dotted}")
            node = node[k]
        leaf = keys[-1]
        if not isinstance(node, dict) or leaf not in node:
            raise ConfigError(f"unknown config key: {dotted}")
        value = _parse_value(raw)
        current = node[leaf]
        if isinstance(current, dict):
            raise ConfigError(f"{dotted} is a section, not a value")
        if isinstance(current, list) and not isinstance(value, (list, tuple)):
            value = [value]
        if not _type_ok(current, value):
            raise ConfigError(
                f"{dotted}: expected {type(current).__name__}, "
                f"got {type(value).__name__}"
            )
        node[leaf] = value
    return out


def resolve_config(config_path=None, set_exprs=()) -> dict:
    config = default_config()
    if config_path:
        config = merge_config(config, load_config_file(config_path))
    if set_exprs:
        config = apply_set(config, set_exprs)
    return config


def config_fingerprint(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# dataclass hydration


def build_dataclass(cls, mapping: dict, _path: str = ""):
    """Instantiate a (possibly nested) dataclass from a config section,
    rejecting unknown keys and restoring tuple-typed fields."""
    if not dataclasses.is_dataclass(cls):
        raise ConfigError(f"{cls!r} is not a dataclass")
    field_map = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(mapping) - set(field_map)
    if unknown:
        where = _path or cls.__name__
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")
    kwargs = {}
    defaults = {}
    for f in field_map.values():
        if f.default is not dataclasses.MISSING:
            defaults[f.name] = f.default
        elif f.default_factory is not dataclasses.MISSING:  # type: ignore[misc]
            defaults[f.name] = f.default_factory()  # type: ignore[misc]
    for name, value in mapping.items():
        default = defaults.get(name)
        sub_path = f"{_path}.{name}" if _path else name
        if dataclasses.is_dataclass(default) and isinstance(value, dict):
            kwargs[name] = build_dataclass(type(default), value, sub_path)
        elif isinstance(default, tuple) and isinstance(value, list):
            kwargs[name] = tuple(value)
        else:
            kwargs[name] = value
    return cls(**kwargs)


# ---------------------------------------------------------------------------
# run directories


def run_root(config: dict) -> Path:
    env = os.environ.get(ENV_RUN_ROOT, "").strip()
    return Path(env) if env else Path(config["run"]["root"])


def run_dir_for(config: dict, label: str) -> Path:
    run_id = str(config["run"]["id"]).strip()
    if not run_id:
        run_id = f"{label}-{config_fingerprint(config)[:10]}"
    return run_root(config) / run_id
