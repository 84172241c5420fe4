"""Detector checkpoints: spec + weights + feature parameters in one file."""

from __future__ import annotations

import dataclasses
import hashlib
from pathlib import Path

import numpy as np
import torch

from ..errors import DataError
from ..nnutil import atomic_torch_save, state_fingerprint
from ..registry import REGISTRY_VERSION
from .api import Detector, DetectorSpec, build_detector

FORMAT = "detector-checkpoint-v1"


def _hash_value(h, value) -> None:
    # canonical content walk; pickle bytes are not save/load stable (memo
    # sharing), so hash dtypes + raw array bytes + sorted attributes instead
    if value is None or isinstance(value, (bool, int, float, str, bytes)):
        h.update(repr(value).encode())
    elif isinstance(value, np.generic):
        _hash_value(h, np.asarray(value))
    elif isinstance(value, np.ndarray):
        h.update(str(value.dtype).encode())
        h.update(str(value.shape).encode())
        h.update(np.ascontiguousarray(value).tobytes())
    elif isinstance(value, (list, tuple)):
        h.update(b"[")
        for item in value:
            _hash_value(h, item)
        h.update(b"]")
    elif isinstance(value, (set, frozenset)):
        _hash_value(h, sorted(repr(v) for v in value))
    elif isinstance(value, dict):
        for key in sorted(value, key=repr):
            h.update(repr(key).encode())
            _hash_value(h, value[key])
    elif dataclasses.is_dataclass(value):
        h.update(type(value).__name__.encode())
        for f in dataclasses.fields(value):
            h.update(f.name.encode())
            _hash_value(h, getattr(value, f.name))
    elif hasattr(value, "__dict__"):
        h.update(type(value).__name__.encode())
        _hash_value(h, vars(value))
    else:
        h.update(repr(value).encode())


def detector_fingerprint(det: Detector) -> str:
    if det.spec.arch == "minirocket":
        h = hashlib.sha256()
        _hash_value(h, det.mr_params)
        _hash_value(h, det.mr_pipeline)
        return h.hexdigest()
    state = dict(det.module.state_dict())
    if det.adapter is not None:
        state.update({f"adapter.{k}": v for k, v in det.adapter.state_dict().items()})
    return state_fingerprint(state)


def save_detector(
    path: str | Path,
    det: Detector,
    schedule: dict | None = None,
    parent_fingerprint: str | None = None,
    extra: dict | None = None,
) -> str:
    fingerprint = detector_fingerprint(det)
    payload = {
        "format": FORMAT,
        "registry_version": REGISTRY_VERSION,
        "spec": dataclasses.asdict(det.spec),
        "trained": det.trained,
        "input_dim": det.input_dim,
        "module_state": det.module.state_dict() if det.module is not None else None,
        "adapter_state": det.adapter.state_dict() if det.adapter is not None else None,
        "adapter_shape": (
            tuple(det.adapter.weight.shape[:2]) if det.adapter is not None else None
        ),
        "norm_mean": det.norm_mean,
        "norm_std": det.norm_std,
        "mr_params": det.mr_params,
        "mr_pipeline": det.mr_pipeline,
        "fingerprint": fingerprint,
        "parent_fingerprint": parent_fingerprint,
        "schedule": schedule or {},
        "extra": extra or {},
    }
    atomic_torch_save(payload, path)
    return fingerprint


def load_detector(path: str | Path) -> dict:
    path = Path(path)
    if not path.exists():
        raise DataError(f"no detector checkpoint at {path}; run the training stage first")
    payload = torch.load(path, map_location="cpu", weights_only=False)
    if payload.get("format") != FORMAT:
        raise DataError(f"{path} is not a detector checkpoint")
    if payload.get("registry_version") != REGISTRY_VERSION:
        raise DataError(
            f"{path} was written for blendshape registry "
            f"{payload.get('registry_version')!r}, current is {REGISTRY_VERSION!r}"
        )
    det = build_detector(DetectorSpec(**payload["spec"]))
    det.trained = payload["trained"]
    det.input_dim = payload["input_dim"]
    if payload["module_state"] is not None:
        det.module.load_state_dict(payload["module_state"])
    if payload["adapter_state"] is not None:
        from torch import nn

        out_ch, in_ch = payload["adapter_shape"]
        det.adapter = nn.Conv1d(in_ch, out_ch, 1)
        det.adapter.load_state_dict(payload["adapter_state"])
    det.norm_mean = payload["norm_mean"]
    det.norm_std = payload["norm_std"]
    det.mr_params = payload["mr_params"]
    det.mr_pipeline = payload["mr_pipeline"]
    return {
        "detector": det,
        "fingerprint": payload["fingerprint"],
        "parent_fingerprint": payload.get("parent_fingerprint"),
        "schedule": payload.get("schedule", {}),
        "extra": payload.get("extra", {}),
    }
