"""Synthetic participants and their behavioral parameters."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidArgumentError
from ..registry import N_BLENDSHAPES, STATE_DIM
from ..seeding import rng_for, seed_for


@dataclass(frozen=True)
class BehaviorConfig:
    """Shape parameters of reaction signatures and stream noise.

    The reaction envelope rises with time constant `rise_s`, decays with
    `decay_s` toward `plateau` (not to zero, so long reactions keep a
    sustained offset). Distractor bursts hit non-reaction channels in both
    classes, making raw burst energy non-discriminative across people.
    """

    rise_s: float = 0.25
    decay_s: float = 2.0
    plateau: float = 0.6
    micro_amp: float = 12.0  # resting micro-motion, blendshape units
    micro_amp_angles: float = 1.2  # degrees
    drift_amp_deg: float = 4.0
    distractor_rate: float = 0.10  # expected bursts per second of video
    distractor_amp: tuple[float, float] = (0.5, 1.0)  # x reaction_gain
    distractor_len_s: tuple[float, float] = (1.5, 4.0)
    recon_sigma: float = 6.0  # noise on the reconstructed 55-dim stream
    open_noise: float = 5.0  # noise on the 49-dim analog stream
    pixel_noise_per_unit: float = 5e-4  # render noise per state-noise unit

    def __post_init__(self):
        if self.plateau <= 0.5:
            # the generator promises post-onset mean >= gain/2; the decay
            # floor is what carries that for arbitrarily long clips
            raise InvalidArgumentError("reaction plateau must exceed 0.5")


@dataclass(frozen=True, eq=False)
class ParticipantProfile:
    participant_id: str
    anatomy_seed: int
    reaction_gain: float
    reaction_channels: tuple[int, ...]
    noise_sigma: float
    base_state: np.ndarray = field(repr=False)  # (55,) resting offsets

    def __post_init__(self):
        if not self.reaction_channels:
            raise InvalidArgumentError("reaction_channels must be nonempty")
        if self.reaction_gain <= 0:
            raise InvalidArgumentError("reaction_gain must be positive")
        if self.noise_sigma < 0:
            raise InvalidArgumentError("noise_sigma must be non-negative")
        if self.base_state.shape != (STATE_DIM,):
            raise InvalidArgumentError("base_state must have 55 values")


def gen_profiles(
    n: int,
    seed: int,
    channels_mode: str = "per_participant",
    n_channels_range: tuple[int, int] = (3, 8),
    noise_sigma: float = 8.0,
    gain_lo: float = 150.0,
    gain_ratio: float = 4.0,
) -> list[ParticipantProfile]:
    """Deterministic participant roster.

    Reaction gains sit on a geometric ladder spanning `gain_ratio` with
    +/-10% jitter; with the default ratio 4 the max/min spread stays >= 3x
    for any roster size, which is what makes personalization pay off.
    `channels_mode="shared"` gives everyone the same reaction channels
    (the high-separability regime); the default draws them per participant.
    """
    if n < 1:
        raise InvalidArgumentError("participant count must be >= 1")
    if channels_mode not in ("per_participant", "shared"):
        raise InvalidArgumentError(f"unknown channels_mode {channels_mode!r}")

    ladder_rng = rng_for(seed, "gain-ladder")
    exponents = ladder_rng.permutation(n) / max(1, n - 1) if n > 1 else np.array([0.5])
    shared_channels: tuple[int, ...] | None = None
    if channels_mode == "shared":
        k = int(np.mean(n_channels_range))
        shared_rng = rng_for(seed, "shared-channels")
        shared_channels = tuple(
            sorted(int(c) for c in shared_rng.choice(N_BLENDSHAPES, size=k, replace=False))
        )

    profiles = []
    for i in range(n):
        pid = f"P{i + 1:02d}"
        rng = rng_for(seed, "profile", pid)
        if shared_channels is not None:
            channels = shared_channels
        else:
            k = int(rng.integers(n_channels_range[0], n_channels_range[1] + 1))
            channels = tuple(
                sorted(int(c) for c in rng.choice(N_BLENDSHAPES, size=k, replace=False))
            )
        gain = float(gain_lo * gain_ratio ** exponents[i] * rng.uniform(0.9, 1.1))
        base = np.empty(STATE_DIM)
        base[:N_BLENDSHAPES] = rng.uniform(20.0, 120.0, size=N_BLENDSHAPES)
        base[N_BLENDSHAPES:] = np.clip(rng.normal(0.0, 5.0, size=3), -20.0, 20.0)
        profiles.append(
            ParticipantProfile(
                participant_id=pid,
                anatomy_seed=seed_for(seed, "anatomy", pid),
                reaction_gain=gain,
                reaction_channels=channels,
                noise_sigma=float(noise_sigma),
                base_state=base,
            )
        )
    return profiles
