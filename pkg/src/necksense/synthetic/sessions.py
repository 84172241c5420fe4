"""Session assembly: states, labels, and lazily rendered frame pairs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from ..errors import InvalidArgumentError
from ..reaction import frame_keep_labels
from ..seeding import rng_for
from .anatomy import DEFAULT_HEIGHT, DEFAULT_WIDTH, render_frame_pair
from .motion import calibration_states, stimulus_motion
from .profiles import BehaviorConfig, ParticipantProfile
from .stimuli import StimulusSpec


@dataclass(frozen=True, eq=False)
class FramePair:
    left: np.ndarray
    right: np.ndarray
    timestamp_s: float
    participant_id: str
    session_id: str
    frame_index: int


class FramePairSequence:
    """Lazy random-access view rendering frames on demand.

    Rendering a frame twice yields identical pixels: the sensor-noise rng
    is derived from (seed, frame index), not from access order.
    """

    def __init__(
        self,
        states: np.ndarray,
        timestamps: np.ndarray,
        profile: ParticipantProfile,
        session_id: str,
        seed: int,
        height: int = DEFAULT_HEIGHT,
        width: int = DEFAULT_WIDTH,
        pixel_noise_per_unit: float = 5e-4,
    ):
        self._states = states
        self._timestamps = timestamps
        self._profile = profile
        self._session_id = session_id
        self._seed = seed
        self.height = height
        self.width = width
        self._pixel_noise = pixel_noise_per_unit

    def __len__(self) -> int:
        return len(self._states)

    def __getitem__(self, i: int) -> FramePair:
        if not (-len(self) <= i < len(self)):
            raise IndexError(i)
        i = i % len(self)
        rng = rng_for(self._seed, "pixels", self._session_id, i)
        left, right = render_frame_pair(
            self._states[i],
            self._profile,
            rng=rng,
            height=self.height,
            width=self.width,
            pixel_noise_per_unit=self._pixel_noise,
        )
        return FramePair(
            left=left,
            right=right,
            timestamp_s=float(self._timestamps[i]),
            participant_id=self._profile.participant_id,
            session_id=self._session_id,
            frame_index=i,
        )

    def __iter__(self) -> Iterator[FramePair]:
        for i in range(len(self)):
            yield self[i]


@dataclass(eq=False)
class SyntheticSession:
    profile: ParticipantProfile
    stimulus: StimulusSpec | None  # None for calibration sessions
    fps: int
    timestamps: np.ndarray  # (T,)
    truth_states: np.ndarray  # (T, 55)
    labels: np.ndarray  # (T,) int8 {0,1}
    keep_mask: np.ndarray  # (T,) bool; False = discard (pre-onset error frames)
    frames: FramePairSequence = field(repr=False)

    def __post_init__(self):
        n = len(self.timestamps)
        if not (len(self.truth_states) == len(self.labels) == len(self.keep_mask) == n):
            raise InvalidArgumentError("session arrays disagree in length")
        if len(self.frames) != n:
            raise InvalidArgumentError("frame sequence length mismatch")

    @property
    def session_id(self) -> str:
        return self.stimulus.stimulus_id if self.stimulus else "calibration"

    @property
    def n_frames(self) -> int:
        return len(self.timestamps)


def _frame_grid(duration_s: float, fps: int) -> np.ndarray:
    n = int(round(duration_s * fps))
    return np.arange(n, dtype=np.float64) / fps


def gen_calibration_session(
    profile: ParticipantProfile,
    duration_s: float = 300.0,
    fps: int = 12,
    seed: int = 0,
    behavior: BehaviorConfig = BehaviorConfig(),
    height: int = DEFAULT_HEIGHT,
    width: int = DEFAULT_WIDTH,
) -> SyntheticSession:
    """Scripted-motion session with ground truth; all frames neutral."""
    if duration_s <= 0:
        raise InvalidArgumentError("duration must be positive")
    t = _frame_grid(duration_s, fps)
    states = calibration_states(profile, t, seed)
    n = len(t)
    frames = FramePairSequence(
        states,
        t,
        profile,
        "calibration",
        seed,
        height=height,
        width=width,
        pixel_noise_per_unit=behavior.pixel_noise_per_unit,
    )
    return SyntheticSession(
        profile=profile,
        stimulus=None,
        fps=fps,
        timestamps=t,
        truth_states=states,
        labels=np.zeros(n, dtype=np.int8),
        keep_mask=np.ones(n, dtype=bool),
        frames=frames,
    )


def gen_stimulus_session(
    profile: ParticipantProfile,
    spec: StimulusSpec,
    seed: int,
    behavior: BehaviorConfig = BehaviorConfig(),
    height: int = DEFAULT_HEIGHT,
    width: int = DEFAULT_WIDTH,
) -> SyntheticSession:
    """One video-watching session; labels follow the keep/label rule."""
    t = _frame_grid(spec.duration_s, spec.fps)
    motion = stimulus_motion(profile, spec, seed, behavior)
    noise_rng = rng_for(seed, "state-noise", profile.participant_id, spec.stimulus_id)
    states = motion(t, noise_rng)
    keep, labels = frame_keep_labels(t, spec)
    frames = FramePairSequence(
        states,
        t,
        profile,
        spec.stimulus_id,
        seed,
        height=height,
        width=width,
        pixel_noise_per_unit=behavior.pixel_noise_per_unit,
    )
    return SyntheticSession(
        profile=profile,
        stimulus=spec,
        fps=spec.fps,
        timestamps=t,
        truth_states=states,
        labels=labels,
        keep_mask=keep,
        frames=frames,
    )
