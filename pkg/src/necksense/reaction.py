"""Labeled reaction streams and their windowed form.

A reaction stream is one (participant, stimulus video) recording at 12 fps
with a binary frame label: 0 neutral, 1 error reaction. Control videos are
kept whole and labeled 0; error videos keep only frames at or after the
failure onset, labeled 1 (pre-onset frames are discarded — they are
neither clean neutral nor reaction). Classifiers consume fixed-length
sliding windows whose label is the mode of covered frame labels, ties
resolved to 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, InvalidArgumentError
from .registry import REGISTRY_VERSION

TARGET_FPS = 12


@dataclass
class ReactionSequence:
    participant_id: str
    stimulus_id: str
    kind: str  # control | human_error | robot_error
    timestamps: np.ndarray  # (T,) seconds
    features: np.ndarray  # (T, F) float32
    labels: np.ndarray  # (T,) int8, values {0,1}
    fps: int = TARGET_FPS

    def __post_init__(self):
        self.timestamps = np.asarray(self.timestamps, dtype=np.float64)
        self.features = np.asarray(self.features, dtype=np.float32)
        self.labels = np.asarray(self.labels, dtype=np.int8)
        t = len(self.timestamps)
        if self.features.ndim != 2 or len(self.features) != t or len(self.labels) != t:
            raise InvalidArgumentError(
                f"sequence {self.participant_id}/{self.stimulus_id}: "
                f"misaligned arrays ({t} timestamps, {self.features.shape} features, "
                f"{len(self.labels)} labels)"
            )
        if t and not np.all(np.isin(self.labels, (0, 1))):
            raise InvalidArgumentError("labels must be binary")
        if self.kind == "control" and np.any(self.labels != 0):
            raise InvalidArgumentError("control sequences must be all-neutral")

    @property
    def n_frames(self) -> int:
        return len(self.timestamps)

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class LabeledWindow:
    matrix: np.ndarray  # (F, interval_len) float32
    label: int
    origin: tuple[str, str, int]  # (participant, stimulus, start frame index)


def frame_keep_labels(timestamps, spec) -> tuple[np.ndarray, np.ndarray]:
    """Per-frame (keep, label) under the labeling rule, full timeline.

    Control: keep everything, label 0. Error: keep frames with
    t >= failure_onset_s labeled 1; earlier frames are dropped.
    This single function backs both the dataset builder and the
    generator's truth files, so the two can never drift apart.
    """
    t = np.asarray(timestamps, dtype=np.float64)
    if spec.kind == "control":
        return np.ones(len(t), dtype=bool), np.zeros(len(t), dtype=np.int8)
    if spec.failure_onset_s is None:
        raise InvalidArgumentError(
            f"stimulus {spec.stimulus_id}: error video without failure onset"
        )
    keep = t >= spec.failure_onset_s
    labels = np.where(keep, 1, 0).astype(np.int8)
    return keep, labels


def label_frames(timestamps, features, spec, participant_id: str = "") -> ReactionSequence:
    """Apply the keep/label rule and return the kept stream."""
    feats = np.asarray(features, dtype=np.float32)
    t = np.asarray(timestamps, dtype=np.float64)
    if len(t) != len(feats):
        raise InvalidArgumentError("timestamps and features disagree in length")
    keep, labels = frame_keep_labels(t, spec)
    return ReactionSequence(
        participant_id=participant_id,
        stimulus_id=spec.stimulus_id,
        kind=spec.kind,
        timestamps=t[keep],
        features=feats[keep],
        labels=labels[keep],
    )


def align_stream(
    features: np.ndarray,
    src_fps: float,
    target_fps: float = TARGET_FPS,
    timestamps: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Undersample a faster uniform stream onto the target grid.

    Picks the nearest source frame for each target grid point j/target_fps
    while the grid point stays within half a source period of the stream's
    end. Returns (selected features, source indices). No upsampling.
    """
    if src_fps < target_fps:
        raise InvalidArgumentError(
            f"cannot align {src_fps} fps up to {target_fps} fps (no upsampling)"
        )
    feats = np.asarray(features)
    n = len(feats)
    if n == 0:
        return feats.copy(), np.zeros(0, dtype=np.int64)
    if timestamps is None:
        times = np.arange(n, dtype=np.float64) / src_fps
    else:
        times = np.asarray(timestamps, dtype=np.float64)
    half_period = 1.0 / (2.0 * src_fps)
    t_last = times[-1]
    n_target = int(np.floor((t_last + half_period) * target_fps)) + 1
    grid = np.arange(n_target, dtype=np.float64) / target_fps
    # nearest neighbor over a sorted axis
    pos = np.searchsorted(times, grid)
    pos = np.clip(pos, 1, n - 1)
    left = pos - 1
    choose_left = (grid - times[left]) <= (times[pos] - grid)
    idx = np.where(choose_left, left, pos).astype(np.int64)
    return feats[idx], idx


def make_windows(seq: ReactionSequence, interval_len: int, stride: int) -> list[LabeledWindow]:
    """Sliding windows at offsets 0, S, 2S, ... while they fit.

    Window label is the mode of covered frame labels; a 0/1 tie resolves
    to 1 (favors recall of failures). Short sequences yield no windows.
    """
    if interval_len < 1 or stride < 1:
        raise InvalidArgumentError("interval_len and stride must be >= 1")
    t = seq.n_frames
    if t < interval_len:
        return []
    out = []
    feats = seq.features  # (T, F)
    for start in range(0, t - interval_len + 1, stride):
        stop = start + interval_len
        ones = int(np.sum(seq.labels[start:stop]))
        label = 1 if ones * 2 >= interval_len else 0
        out.append(
            LabeledWindow(
                matrix=np.ascontiguousarray(feats[start:stop].T),
                label=label,
                origin=(seq.participant_id, seq.stimulus_id, start),
            )
        )
    return out


@dataclass
class WindowSet:
    """Materialized window dataset: X (N, F, IL), y (N,), origins (N, 3)."""

    X: np.ndarray
    y: np.ndarray
    origins: list[tuple[str, str, int]]
    interval_len: int
    stride: int
    registry_version: str = REGISTRY_VERSION
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float32)
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.X.ndim != 3 or not (len(self.X) == len(self.y) == len(self.origins)):
            raise InvalidArgumentError("window set arrays disagree in length")

    @property
    def n_windows(self) -> int:
        return len(self.y)

    @property
    def feature_dim(self) -> int:
        return self.X.shape[1]

    def participants(self) -> list[str]:
        return sorted({o[0] for o in self.origins})

    def subset(self, mask: np.ndarray) -> "WindowSet":
        mask = np.asarray(mask)
        if mask.dtype == bool:
            idx = np.flatnonzero(mask)
        else:
            idx = mask.astype(np.int64)
        return WindowSet(
            X=self.X[idx],
            y=self.y[idx],
            origins=[self.origins[i] for i in idx],
            interval_len=self.interval_len,
            stride=self.stride,
            registry_version=self.registry_version,
            extra=dict(self.extra),
        )

    def for_participants(self, participants) -> "WindowSet":
        wanted = set(participants)
        mask = np.array([o[0] in wanted for o in self.origins], dtype=bool)
        return self.subset(mask)

    def class_counts(self) -> tuple[int, int]:
        return int(np.sum(self.y == 0)), int(np.sum(self.y == 1))

    def save(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        header = {
            "feature_dim": int(self.feature_dim),
            "interval_len": int(self.interval_len),
            "stride": int(self.stride),
            "registry_version": self.registry_version,
        }
        tmp = path.with_suffix(path.suffix + ".tmp")
        with open(tmp, "wb") as fh:
            np.savez_compressed(
                fh,
                X=self.X,
                y=self.y,
                origin_participant=np.array([o[0] for o in self.origins]),
                origin_stimulus=np.array([o[1] for o in self.origins]),
                origin_start=np.array([o[2] for o in self.origins], dtype=np.int64),
                header=np.frombuffer(json.dumps(header).encode(), dtype=np.uint8),
            )
        tmp.replace(path)

    @classmethod
    def load(cls, path) -> "WindowSet":
        path = Path(path)
        if not path.exists():
            raise DataError(f"window set not found: {path}")
        with np.load(path, allow_pickle=False) as z:
            header = json.loads(bytes(z["header"].tobytes()).decode())
            origins = list(
                zip(
                    (str(s) for s in z["origin_participant"]),
                    (str(s) for s in z["origin_stimulus"]),
                    (int(i) for i in z["origin_start"]),
                )
            )
            return cls(
                X=z["X"],
                y=z["y"],
                origins=origins,
                interval_len=header["interval_len"],
                stride=header["stride"],
                registry_version=header["registry_version"],
            )


def build_window_set(
    sequences: list[ReactionSequence],
    interval_len: int,
    stride: int,
    participants=None,
) -> WindowSet:
    """Window every sequence; deterministic (participant, stimulus, offset) order."""
    if participants is not None:
        wanted = set(participants)
        sequences = [s for s in sequences if s.participant_id in wanted]
    ordered = sorted(sequences, key=lambda s: (s.participant_id, s.stimulus_id))
    windows: list[LabeledWindow] = []
    for seq in ordered:
        windows.extend(make_windows(seq, interval_len, stride))
    if not windows:
        feature_dim = ordered[0].feature_dim if ordered else 0
        return WindowSet(
            X=np.zeros((0, feature_dim, interval_len), dtype=np.float32),
            y=np.zeros(0, dtype=np.int64),
            origins=[],
            interval_len=interval_len,
            stride=stride,
        )
    return WindowSet(
        X=np.stack([w.matrix for w in windows]),
        y=np.array([w.label for w in windows], dtype=np.int64),
        origins=[w.origin for w in windows],
        interval_len=interval_len,
        stride=stride,
    )
