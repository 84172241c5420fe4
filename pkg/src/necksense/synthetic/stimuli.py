"""Stimulus video set with study-scale durations.

Thirty videos per set by default: 10 control, 10 human-error, 10
robot-error, shared by every participant. Durations are drawn per kind
and moment-matched so that, at 12 fps over 25 participants, kept-frame
totals land on the study's scale: control clips average 17.25 s (all
frames neutral), error clips 11.91 s with onset near 47% of the clip
(post-onset frames are the error class), overall clip mean 13.69 s.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgumentError
from ..seeding import rng_for

KINDS = ("control", "human_error", "robot_error")

CONTROL_MEAN_S = 17.25
ERROR_MEAN_S = 11.91
DURATION_SD_S = 7.77
DURATION_CLIP_S = (4.0, 40.0)
ONSET_FRAC_RANGE = (0.35, 0.59)
ONSET_FRAC_MEAN = 0.4707


@dataclass(frozen=True)
class StimulusSpec:
    stimulus_id: str
    kind: str
    duration_s: float
    failure_onset_s: float | None
    fps: int = 12

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgumentError(f"unknown stimulus kind {self.kind!r}")
        if self.duration_s <= 0:
            raise InvalidArgumentError("duration must be positive")
        if self.fps < 1:
            raise InvalidArgumentError("fps must be >= 1")
        if self.kind == "control":
            if self.failure_onset_s is not None:
                raise InvalidArgumentError("control videos cannot have a failure onset")
        else:
            if self.failure_onset_s is None:
                raise InvalidArgumentError(f"{self.kind} video requires a failure onset")
            if not (0.0 <= self.failure_onset_s < self.duration_s):
                raise InvalidArgumentError("failure onset must lie inside the video")

    @property
    def n_frames(self) -> int:
        return int(round(self.duration_s * self.fps))


def _matched_durations(rng, n: int, mean_s: float) -> np.ndarray:
    if n == 0:
        return np.zeros(0)
    draws = rng.normal(mean_s, DURATION_SD_S, size=n)
    draws = np.clip(draws, *DURATION_CLIP_S)
    draws = draws * (mean_s / draws.mean())  # pin the kind mean exactly
    return np.clip(draws, *DURATION_CLIP_S)


def default_stimulus_set(
    seed: int,
    n_control: int = 10,
    n_human: int = 10,
    n_robot: int = 10,
    fps: int = 12,
    duration_scale: float = 1.0,
) -> list[StimulusSpec]:
    """One shared video list; deterministic given the seed."""
    if min(n_control, n_human, n_robot) < 0:
        raise InvalidArgumentError("video counts cannot be negative")
    if n_control + n_human + n_robot < 1:
        raise InvalidArgumentError("the stimulus set needs at least one video")
    if duration_scale <= 0:
        raise InvalidArgumentError("duration_scale must be positive")
    rng = rng_for(seed, "stimulus-set")

    control_durs = _matched_durations(rng, n_control, CONTROL_MEAN_S)
    n_error = n_human + n_robot
    error_durs = _matched_durations(rng, n_error, ERROR_MEAN_S)
    fracs = rng.uniform(*ONSET_FRAC_RANGE, size=n_error)
    if n_error > 0:
        fracs = np.clip(fracs + (ONSET_FRAC_MEAN - fracs.mean()), 0.10, 0.90)

    specs: list[StimulusSpec] = []
    for i in range(n_control):
        specs.append(
            StimulusSpec(
                stimulus_id=f"C{i + 1:02d}",
                kind="control",
                duration_s=float(control_durs[i] * duration_scale),
                failure_onset_s=None,
                fps=fps,
            )
        )
    for j in range(n_error):
        kind = "human_error" if j < n_human else "robot_error"
        idx = j + 1 if j < n_human else j - n_human + 1
        prefix = "H" if kind == "human_error" else "R"
        dur = float(error_durs[j] * duration_scale)
        specs.append(
            StimulusSpec(
                stimulus_id=f"{prefix}{idx:02d}",
                kind=kind,
                duration_s=dur,
                failure_onset_s=float(fracs[j] * dur),
                fps=fps,
            )
        )
    return specs
