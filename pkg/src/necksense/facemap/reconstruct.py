"""Inference: paired IR frames -> clamped face-state time series."""

from __future__ import annotations

import numpy as np
import torch

from ..errors import InvalidArgumentError
from ..imaging import preprocess_pair
from ..registry import clamp_states, denormalize_states
from .model import FacemapModel


def reconstruct(
    model: FacemapModel,
    frames,
    timestamps: np.ndarray | None = None,
    batch_size: int = 32,
) -> tuple[np.ndarray, np.ndarray]:
    """Run the model over camera frame pairs.

    `frames` is any sequence whose items are either FramePair-like
    (.left/.right/.timestamp_s) or (left, right) array tuples. Returns
    (timestamps, states) with states clamped to valid ranges.
    """
    config = model.config.imaging
    model.eval()

    tiles: list[np.ndarray] = []
    times: list[float] = []
    outs: list[np.ndarray] = []

    def flush():
        if not tiles:
            return
        x = torch.from_numpy(np.stack(tiles)).unsqueeze(1)
        with torch.no_grad():
            outs.append(model(x).numpy())
        tiles.clear()

    n_frames = 0
    for item in frames:
        if hasattr(item, "left"):
            left, right = item.left, item.right
            t = float(getattr(item, "timestamp_s", n_frames))
        else:
            left, right = item
            t = float(n_frames)
        tiles.append(preprocess_pair(left, right, config))
        times.append(t)
        n_frames += 1
        if len(tiles) >= batch_size:
            flush()
    flush()

    if n_frames == 0:
        raise InvalidArgumentError("no frames to reconstruct")
    states = denormalize_states(np.concatenate(outs, axis=0).astype(np.float64))
    states = clamp_states(states)
    ts = (
        np.asarray(timestamps, dtype=np.float64)
        if timestamps is not None
        else np.asarray(times, dtype=np.float64)
    )
    if len(ts) != n_frames:
        raise InvalidArgumentError("timestamps and frames disagree in length")
    return ts, states
