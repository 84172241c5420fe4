"""Checkpoint container for reconstruction models.

Stores the weights, the full architecture config, the blendshape
registry version, and a fingerprint chain: fine-tuned checkpoints carry
their pretrained parent's fingerprint so provenance is auditable.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

import torch

from ..errors import DataError
from ..nnutil import atomic_torch_save, state_fingerprint
from ..registry import REGISTRY_VERSION
from .model import FacemapConfig, FacemapModel, build_facemap

FORMAT = "facemap-checkpoint-v1"


def save_checkpoint(
    path: str | Path,
    model: FacemapModel,
    schedule: dict | None = None,
    parent_fingerprint: str | None = None,
    extra: dict | None = None,
) -> str:
    """Atomic write; returns this checkpoint's weight fingerprint."""
    fingerprint = state_fingerprint(model)
    payload = {
        "format": FORMAT,
        "registry_version": REGISTRY_VERSION,
        "config": dataclasses.asdict(model.config),
        "state_dict": model.state_dict(),
        "fingerprint": fingerprint,
        "parent_fingerprint": parent_fingerprint,
        "schedule": schedule or {},
        "extra": extra or {},
    }
    atomic_torch_save(payload, path)
    return fingerprint


def load_checkpoint(path: str | Path) -> dict:
    """Rebuild the model; returns {model, config, fingerprint, ...}."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"no checkpoint at {path}; run the training stage first")
    payload = torch.load(path, map_location="cpu", weights_only=False)
    if payload.get("format") != FORMAT:
        raise DataError(f"{path} is not a reconstruction checkpoint")
    if payload.get("registry_version") != REGISTRY_VERSION:
        raise DataError(
            f"{path} was written for blendshape registry "
            f"{payload.get('registry_version')!r}, current is {REGISTRY_VERSION!r}"
        )
    config = FacemapConfig(**payload["config"])
    model = build_facemap(config)
    model.load_state_dict(payload["state_dict"])
    return {
        "model": model,
        "config": config,
        "fingerprint": payload["fingerprint"],
        "parent_fingerprint": payload.get("parent_fingerprint"),
        "schedule": payload.get("schedule", {}),
        "extra": payload.get("extra", {}),
    }
