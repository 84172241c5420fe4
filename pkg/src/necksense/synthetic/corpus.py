"""Corpus presets, on-disk generation, and loading.

A corpus is a roster of participants who all watch the same stimulus
set. `gen_corpus` materializes it under a directory as CSV files (plus
optional IR PNG frames) with a checksum manifest; `load_reaction_dataset`
reads the per-video feature streams back. Generation is deterministic:
the same config always produces byte-identical files.

Layout:
    <root>/corpus.json
    <root>/manifest.json
    <root>/data/P01/calibration/truth.csv [+ ir_left_%06d.png ...]
    <root>/data/P01/stimulus/C01/{truth.csv, neck.csv, open.csv, meta.json}

truth.csv carries every frame of the video with the ground-truth face
state; its label column is -1 for frames dropped by the keep rule
(error-video frames before the failure onset), else the class. neck.csv
and open.csv carry kept frames only.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from ..errors import DataError, InvalidArgumentError
from ..manifest import write_manifest
from ..reaction import ReactionSequence
from ..registry import REGISTRY_VERSION, STATE_COLUMNS, STATE_DIM
from .anatomy import DEFAULT_HEIGHT, DEFAULT_WIDTH
from .profiles import BehaviorConfig, ParticipantProfile, gen_profiles
from .reactions import (
    OPEN_DIM,
    ReactionDataset,
    build_reaction_datasets,
    make_open_map,
    neck_sequence,
    open_sequence,
)
from .sessions import SyntheticSession, gen_calibration_session, gen_stimulus_session
from .stimuli import StimulusSpec, default_stimulus_set

RENDER_MODES = ("none", "calibration", "all")
OPEN_COLUMNS: tuple[str, ...] = tuple(f"o{i:02d}" for i in range(OPEN_DIM))
CSV_FLOAT_FORMAT = "%.6f"


@dataclass(frozen=True)
class CorpusConfig:
    """Everything that determines a corpus, and nothing else."""

    n_participants: int = 25
    seed: int = 7
    fps: int = 12
    calibration_s: float = 300.0
    n_control: int = 10
    n_human: int = 10
    n_robot: int = 10
    duration_scale: float = 1.0
    channels_mode: str = "per_participant"
    n_channels_range: tuple[int, int] = (3, 8)
    noise_sigma: float = 8.0
    gain_lo: float = 150.0
    gain_ratio: float = 4.0
    behavior: BehaviorConfig = field(default_factory=BehaviorConfig)
    render: str = "none"  # which sessions get PNG frame pairs on disk
    height: int = DEFAULT_HEIGHT
    width: int = DEFAULT_WIDTH
    include_open: bool = True

    def __post_init__(self):
        if self.n_participants < 1:
            raise InvalidArgumentError("need at least one participant")
        if self.render not in RENDER_MODES:
            raise InvalidArgumentError(
                f"render must be one of {RENDER_MODES}, got {self.render!r}"
            )

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def default_corpus_config(**overrides) -> CorpusConfig:
    """Study-scale corpus: 25 participants x 30 shared videos at 12 fps."""
    return CorpusConfig(**overrides)


def separable_corpus_config(n_participants: int = 5, **overrides) -> CorpusConfig:
    """Low-noise, high-gain corpus where reactions are nearly clean steps.

    Everyone reacts on the same channels, stream noise and distractor
    bursts are off, and gains start high; threshold detectors approach
    perfect accuracy here, which makes it the right fixture for floor
    checks rather than for studying personalization.
    """
    behavior = overrides.pop(
        "behavior",
        BehaviorConfig(
            micro_amp=6.0,
            micro_amp_angles=0.6,
            drift_amp_deg=2.0,
            distractor_rate=0.0,
            recon_sigma=1.5,
            open_noise=2.0,
        ),
    )
    base = dict(
        n_participants=n_participants,
        seed=11,
        channels_mode="shared",
        noise_sigma=0.0,
        gain_lo=320.0,
        gain_ratio=4.0,
        behavior=behavior,
    )
    base.update(overrides)
    return CorpusConfig(**base)


def corpus_profiles(config: CorpusConfig) -> list[ParticipantProfile]:
    return gen_profiles(
        config.n_participants,
        config.seed,
        channels_mode=config.channels_mode,
        n_channels_range=config.n_channels_range,
        noise_sigma=config.noise_sigma,
        gain_lo=config.gain_lo,
        gain_ratio=config.gain_ratio,
    )


def corpus_stimuli(config: CorpusConfig) -> list[StimulusSpec]:
    return default_stimulus_set(
        config.seed,
        n_control=config.n_control,
        n_human=config.n_human,
        n_robot=config.n_robot,
        fps=config.fps,
        duration_scale=config.duration_scale,
    )


def corpus_reaction_datasets(config: CorpusConfig) -> dict[str, ReactionDataset]:
    """In-memory feature streams for the whole corpus (no disk round trip)."""
    return build_reaction_datasets(
        corpus_profiles(config),
        corpus_stimuli(config),
        config.seed,
        behavior=config.behavior,
        include_open=config.include_open,
    )


def _write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    tmp.replace(path)


def _write_csv(path: Path, frame: pd.DataFrame) -> None:
    tmp = path.with_name(path.name + ".tmp")
    frame.to_csv(tmp, index=False, float_format=CSV_FLOAT_FORMAT)
    tmp.replace(path)


def _state_frame(timestamps, states, labels) -> pd.DataFrame:
    frame = pd.DataFrame(np.asarray(states, dtype=np.float64), columns=list(STATE_COLUMNS))
    frame.insert(0, "timestamp_s", np.asarray(timestamps, dtype=np.float64))
    frame["label"] = np.asarray(labels, dtype=np.int64)
    return frame


def _open_frame(seq: ReactionSequence) -> pd.DataFrame:
    frame = pd.DataFrame(seq.features.astype(np.float64), columns=list(OPEN_COLUMNS))
    frame.insert(0, "timestamp_s", seq.timestamps.astype(np.float64))
    frame["label"] = seq.labels.astype(np.int64)
    return frame


def _write_frames(session: SyntheticSession, out_dir: Path) -> None:
    from PIL import Image

    for pair in session.frames:
        for side, img in (("left", pair.left), ("right", pair.right)):
            arr = np.clip(np.rint(img * 255.0), 0, 255).astype(np.uint8)
            Image.fromarray(arr, mode="L").save(
                out_dir / f"ir_{side}_{pair.frame_index:06d}.png"
            )


def gen_corpus(out_dir: str | Path, config: CorpusConfig | None = None) -> dict:
    """Write a full corpus to disk; returns totals and the manifest path."""
    config = config or default_corpus_config()
    root = Path(out_dir)
    data_root = root / "data"
    data_root.mkdir(parents=True, exist_ok=True)

    profiles = corpus_profiles(config)
    specs = corpus_stimuli(config)
    open_map = make_open_map(config.seed) if config.include_open else None

    neutral = 0
    error = 0
    calibration_frames = 0
    for profile in profiles:
        pid = profile.participant_id
        cal_dir = data_root / pid / "calibration"
        cal_dir.mkdir(parents=True, exist_ok=True)
        cal = gen_calibration_session(
            profile,
            duration_s=config.calibration_s,
            fps=config.fps,
            seed=config.seed,
            behavior=config.behavior,
            height=config.height,
            width=config.width,
        )
        calibration_frames += cal.n_frames
        _write_csv(
            cal_dir / "truth.csv",
            _state_frame(cal.timestamps, cal.truth_states, cal.labels),
        )
        if config.render in ("calibration", "all"):
            _write_frames(cal, cal_dir)

        for spec in specs:
            vid_dir = data_root / pid / "stimulus" / spec.stimulus_id
            vid_dir.mkdir(parents=True, exist_ok=True)
            session = gen_stimulus_session(
                profile,
                spec,
                config.seed,
                behavior=config.behavior,
                height=config.height,
                width=config.width,
            )
            truth_labels = session.labels.astype(np.int64)
            truth_labels[~session.keep_mask] = -1
            _write_csv(
                vid_dir / "truth.csv",
                _state_frame(session.timestamps, session.truth_states, truth_labels),
            )

            neck = neck_sequence(session, config.seed, config.behavior)
            _write_csv(
                vid_dir / "neck.csv",
                _state_frame(neck.timestamps, neck.features, neck.labels),
            )
            neutral += int(np.sum(neck.labels == 0))
            error += int(np.sum(neck.labels == 1))

            if open_map is not None:
                open_seq = open_sequence(
                    profile, spec, config.seed, config.behavior, open_map
                )
                _write_csv(vid_dir / "open.csv", _open_frame(open_seq))

            meta = {
                "stimulus_id": spec.stimulus_id,
                "kind": spec.kind,
                "duration_s": spec.duration_s,
                "failure_onset_s": spec.failure_onset_s,
                "fps": spec.fps,
                "n_frames": spec.n_frames,
                "n_kept": len(neck.timestamps),
            }
            _write_text(vid_dir / "meta.json", json.dumps(meta, indent=2) + "\n")

            if config.render == "all":
                _write_frames(session, vid_dir)

    summary = {
        "root": str(root),
        "n_participants": config.n_participants,
        "n_videos": len(specs),
        "neutral_frames": neutral,
        "error_frames": error,
        "total_frames": neutral + error,
        "calibration_frames": calibration_frames,
        "registry_version": REGISTRY_VERSION,
        "config_fingerprint": config.fingerprint(),
    }
    _write_text(
        root / "corpus.json",
        json.dumps({"config": config.to_dict(), "summary": summary}, indent=2) + "\n",
    )
    manifest_path = write_manifest(root, {"kind": "corpus", **summary})
    summary["manifest"] = str(manifest_path)
    return summary


def _participant_dirs(root: Path) -> list[Path]:
    data_root = root / "data"
    if not data_root.is_dir():
        raise DataError(f"no corpus data under {root}; run corpus generation first")
    dirs = sorted(p for p in data_root.iterdir() if p.is_dir())
    if not dirs:
        raise DataError(f"corpus at {root} has no participants")
    return dirs


def load_reaction_dataset(root: str | Path, name: str = "neck") -> ReactionDataset:
    """Read every <name>.csv stream back into a ReactionDataset."""
    if name not in ("neck", "open"):
        raise InvalidArgumentError(f"unknown stream {name!r}; expected 'neck' or 'open'")
    root = Path(root)
    columns = list(STATE_COLUMNS) if name == "neck" else list(OPEN_COLUMNS)
    sequences: list[ReactionSequence] = []
    for pdir in _participant_dirs(root):
        stim_root = pdir / "stimulus"
        if not stim_root.is_dir():
            raise DataError(f"{pdir} has no stimulus sessions")
        for vid_dir in sorted(stim_root.iterdir()):
            csv_path = vid_dir / f"{name}.csv"
            if not csv_path.exists():
                raise DataError(f"missing stream file {csv_path}")
            meta = json.loads((vid_dir / "meta.json").read_text())
            table = pd.read_csv(csv_path)
            missing = [c for c in columns if c not in table.columns]
            if missing:
                raise DataError(f"{csv_path} lacks columns {missing[:3]}")
            sequences.append(
                ReactionSequence(
                    participant_id=pdir.name,
                    stimulus_id=meta["stimulus_id"],
                    kind=meta["kind"],
                    timestamps=table["timestamp_s"].to_numpy(np.float64),
                    features=table[columns].to_numpy(np.float32),
                    labels=table["label"].to_numpy(np.int8),
                )
            )
    dim = STATE_DIM if name == "neck" else OPEN_DIM
    return ReactionDataset(name, dim, sequences)


def load_calibration_truth(
    root: str | Path, participant_id: str
) -> tuple[np.ndarray, np.ndarray]:
    """Timestamps and ground-truth states of one calibration recording."""
    path = Path(root) / "data" / participant_id / "calibration" / "truth.csv"
    if not path.exists():
        raise DataError(f"no calibration truth at {path}")
    table = pd.read_csv(path)
    return (
        table["timestamp_s"].to_numpy(np.float64),
        table[list(STATE_COLUMNS)].to_numpy(np.float64),
    )
