"""Tile/state example sets feeding the reconstruction model.

A dataset item is (input tile, ground-truth face state). Tiles either
live in memory or are produced on demand (rendered from a synthetic
session, or read from calibration PNGs), so a 300 s recording never has
to be fully materialized.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from ..errors import DataError, InvalidArgumentError
from ..imaging import ImagingConfig, preprocess_pair
from ..registry import STATE_COLUMNS, validate_states

TileLoader = Callable[[], np.ndarray]


class FacemapDataset:
    """Indexed (tile, state) pairs with participant + time metadata."""

    def __init__(
        self,
        states: np.ndarray,
        participants: Sequence[str],
        timestamps: np.ndarray,
        tiles: np.ndarray | None = None,
        loaders: Sequence[TileLoader] | None = None,
    ):
        self.states = validate_states(states, what="dataset state")
        if self.states.ndim != 2:
            raise InvalidArgumentError("states must be (N, 55)")
        n = len(self.states)
        self.participants = np.asarray(participants, dtype=object)
        self.timestamps = np.asarray(timestamps, dtype=np.float64)
        if len(self.participants) != n or len(self.timestamps) != n:
            raise InvalidArgumentError("states, participants, timestamps disagree in length")
        if (tiles is None) == (loaders is None):
            raise InvalidArgumentError("provide exactly one of tiles or loaders")
        if tiles is not None and len(tiles) != n:
            raise InvalidArgumentError("tiles and states disagree in length")
        if loaders is not None and len(loaders) != n:
            raise InvalidArgumentError("loaders and states disagree in length")
        self._tiles = tiles
        self._loaders = list(loaders) if loaders is not None else None

    def __len__(self) -> int:
        return len(self.states)

    def tile(self, i: int) -> np.ndarray:
        if self._tiles is not None:
            return self._tiles[i]
        return self._loaders[i]()

    def tile_shape(self) -> tuple[int, int]:
        if len(self) == 0:
            raise InvalidArgumentError("empty dataset has no tile shape")
        return tuple(self.tile(0).shape)

    def subset(self, indices) -> "FacemapDataset":
        idx = np.asarray(indices, dtype=np.int64)
        return FacemapDataset(
            states=self.states[idx],
            participants=self.participants[idx],
            timestamps=self.timestamps[idx],
            tiles=self._tiles[idx] if self._tiles is not None else None,
            loaders=[self._loaders[int(i)] for i in idx] if self._loaders is not None else None,
        )

    def participant_ids(self) -> list[str]:
        return sorted(set(self.participants.tolist()))


def concat_datasets(datasets) -> FacemapDataset:
    """Join datasets end to end; all must share a storage mode."""
    datasets = list(datasets)
    if not datasets:
        raise InvalidArgumentError("nothing to concatenate")
    if len(datasets) == 1:
        return datasets[0]
    lazy = [d._tiles is None for d in datasets]
    if any(lazy) != all(lazy):
        raise InvalidArgumentError("cannot mix eager and lazy datasets")
    states = np.concatenate([d.states for d in datasets])
    participants = np.concatenate([d.participants for d in datasets])
    timestamps = np.concatenate([d.timestamps for d in datasets])
    if all(lazy):
        return FacemapDataset(
            states,
            participants,
            timestamps,
            loaders=[loader for d in datasets for loader in d._loaders],
        )
    return FacemapDataset(
        states,
        participants,
        timestamps,
        tiles=np.concatenate([d._tiles for d in datasets]),
    )


def dataset_from_sessions(
    sessions,
    config: ImagingConfig = ImagingConfig(),
    frame_stride: int = 1,
    max_frames_per_session: int | None = None,
    eager: bool = False,
) -> FacemapDataset:
    """Examples from synthetic sessions, rendered lazily by default."""
    if frame_stride < 1:
        raise InvalidArgumentError("frame_stride must be >= 1")
    states, parts, times, loaders = [], [], [], []
    for session in sessions:
        idxs = np.flatnonzero(session.keep_mask)[::frame_stride]
        if max_frames_per_session is not None:
            idxs = idxs[:max_frames_per_session]
        for i in idxs:
            i = int(i)
            states.append(session.truth_states[i])
            parts.append(session.profile.participant_id)
            times.append(session.timestamps[i])

            def load(frames=session.frames, j=i, cfg=config):
                pair = frames[j]
                return preprocess_pair(pair.left, pair.right, cfg)

            loaders.append(load)
    if not states:
        raise InvalidArgumentError("sessions produced no frames")
    ds = FacemapDataset(
        states=np.asarray(states),
        participants=parts,
        timestamps=np.asarray(times),
        loaders=loaders,
    )
    if eager:
        tiles = np.stack([ds.tile(i) for i in range(len(ds))])
        ds = FacemapDataset(
            states=ds.states,
            participants=ds.participants,
            timestamps=ds.timestamps,
            tiles=tiles,
        )
    return ds


_FRAME_RE = re.compile(r"ir_left_(\d{6})\.png$")


def dataset_from_corpus_dir(
    root: str | Path,
    participant_id: str,
    config: ImagingConfig = ImagingConfig(),
) -> FacemapDataset:
    """Calibration PNG pairs + truth.csv for one participant on disk."""
    import pandas as pd
    from PIL import Image

    cal_dir = Path(root) / "data" / participant_id / "calibration"
    truth_path = cal_dir / "truth.csv"
    if not truth_path.exists():
        raise DataError(f"no calibration truth at {truth_path}; generate the corpus first")
    lefts = sorted(p for p in cal_dir.glob("ir_left_*.png") if _FRAME_RE.search(p.name))
    if not lefts:
        raise DataError(
            f"{cal_dir} has no IR frames; regenerate the corpus with calibration "
            "rendering enabled (synth --set corpus.render=calibration)"
        )
    table = pd.read_csv(truth_path)
    truth = table[list(STATE_COLUMNS)].to_numpy(np.float64)
    times = table["timestamp_s"].to_numpy(np.float64)

    states, parts, tstamps, loaders = [], [], [], []
    for left_path in lefts:
        idx = int(_FRAME_RE.search(left_path.name).group(1))
        right_path = left_path.with_name(f"ir_right_{idx:06d}.png")
        if not right_path.exists():
            raise DataError(f"missing right-camera frame {right_path}")
        if idx >= len(truth):
            raise DataError(f"frame index {idx} outside truth table in {cal_dir}")
        states.append(truth[idx])
        parts.append(participant_id)
        tstamps.append(times[idx])

        def load(lp=left_path, rp=right_path, cfg=config):
            left = np.asarray(Image.open(lp), dtype=np.float64) / 255.0
            right = np.asarray(Image.open(rp), dtype=np.float64) / 255.0
            return preprocess_pair(left, right, cfg)

        loaders.append(load)
    return FacemapDataset(
        states=np.asarray(states),
        participants=parts,
        timestamps=np.asarray(tstamps),
        loaders=loaders,
    )
