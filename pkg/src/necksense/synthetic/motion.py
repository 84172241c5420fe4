"""Deterministic facial-motion programs.

Calibration: per-channel bump trains plus head-angle sweeps covering the
state space (every coefficient exceeds half range at least once).
Stimulus: resting micro-motion; on error videos a burst-and-decay
reaction on the profile's reaction channels from the failure onset; on
all videos optional sustained distractor bursts on non-reaction channels.
Programs are closures over seeded parameters, evaluable on any timestamp
grid (the 30 fps analog stream shares one program with the 12 fps truth).
"""

from __future__ import annotations

import numpy as np

from ..registry import N_BLENDSHAPES, STATE_DIM
from ..seeding import rng_for
from .profiles import BehaviorConfig, ParticipantProfile
from .stimuli import StimulusSpec

ANGLE_IDX = np.arange(N_BLENDSHAPES, STATE_DIM)


def reaction_envelope(delta_s: np.ndarray, behavior: BehaviorConfig) -> np.ndarray:
    """Burst shape: fast rise, decay to a sustained plateau; 0 before onset."""
    d = np.asarray(delta_s, dtype=np.float64)
    env = (1.0 - np.exp(-np.maximum(d, 0.0) / behavior.rise_s)) * (
        behavior.plateau + (1.0 - behavior.plateau) * np.exp(-np.maximum(d, 0.0) / behavior.decay_s)
    )
    return np.where(d >= 0.0, env, 0.0)


def calibration_states(
    profile: ParticipantProfile, timestamps: np.ndarray, seed: int
) -> np.ndarray:
    """Scripted sweep: bump trains per coefficient + angle sinusoids + noise."""
    t = np.asarray(timestamps, dtype=np.float64)
    duration = float(t[-1]) + 1e-9 if len(t) else 1.0
    rng = rng_for(seed, "calibration", profile.participant_id)
    states = np.tile(profile.base_state, (len(t), 1))

    for c in range(N_BLENDSHAPES):
        n_bumps = 6 + (c % 5)
        slot = duration / n_bumps
        centers = (np.arange(n_bumps) + 0.5) * slot + rng.uniform(
            -0.25 * slot, 0.25 * slot, size=n_bumps
        )
        widths = rng.uniform(0.5, 1.2, size=n_bumps)
        amps = rng.uniform(250.0, 900.0, size=n_bumps)
        if amps.max() < 620.0:  # guarantee every channel visits its upper half
            amps[int(np.argmax(amps))] = rng.uniform(620.0, 900.0)
        channel = np.zeros(len(t))
        for b in range(n_bumps):
            channel += amps[b] * np.exp(-0.5 * ((t - centers[b]) / widths[b]) ** 2)
        wander_f = rng.uniform(0.05, 0.20)
        wander_p = rng.uniform(0.0, 2.0 * np.pi)
        channel += 40.0 * np.sin(2.0 * np.pi * wander_f * t + wander_p)
        states[:, c] += channel

    for k, a in enumerate(ANGLE_IDX):
        f1 = rng.uniform(0.04, 0.09)
        f2 = rng.uniform(0.15, 0.30)
        p1, p2 = rng.uniform(0.0, 2.0 * np.pi, size=2)
        states[:, a] += 26.0 * np.sin(2.0 * np.pi * f1 * t + p1) + 9.0 * np.sin(
            2.0 * np.pi * f2 * t + p2
        )

    if profile.noise_sigma > 0:
        states += rng.normal(0.0, profile.noise_sigma, size=states.shape)
    states[:, :N_BLENDSHAPES] = np.clip(states[:, :N_BLENDSHAPES], 0.0, 1000.0)
    states[:, N_BLENDSHAPES:] = np.clip(states[:, N_BLENDSHAPES:], -90.0, 90.0)
    return states


def stimulus_motion(
    profile: ParticipantProfile,
    spec: StimulusSpec,
    seed: int,
    behavior: BehaviorConfig,
):
    """Closure evaluating this (participant, video) state program at any times.

    All random structure (micro-motion harmonics, per-channel reaction
    scales, distractor events) is drawn once here, so evaluations at
    different sampling rates describe the same underlying motion. The
    returned function takes (timestamps, noise_rng) and adds white state
    noise from the caller's rng, letting distinct sensors see distinct
    noise over one shared trajectory.
    """
    rng = rng_for(seed, "stimulus", profile.participant_id, spec.stimulus_id)

    micro_f = rng.uniform(0.2, 1.5, size=(STATE_DIM, 2))
    micro_p = rng.uniform(0.0, 2.0 * np.pi, size=(STATE_DIM, 2))
    micro_a = rng.uniform(0.5, 1.0, size=(STATE_DIM, 2))
    micro_a[:N_BLENDSHAPES] *= behavior.micro_amp
    micro_a[N_BLENDSHAPES:] *= behavior.micro_amp_angles

    drift_f = rng.uniform(0.03, 0.08, size=3)
    drift_p = rng.uniform(0.0, 2.0 * np.pi, size=3)

    reaction_scale = np.zeros(N_BLENDSHAPES)
    if spec.kind != "control":
        for c in profile.reaction_channels:
            reaction_scale[c] = rng.uniform(0.9, 1.15)

    distractors: list[tuple[int, float, float, float]] = []
    if behavior.distractor_rate > 0:
        n_events = int(rng.poisson(behavior.distractor_rate * spec.duration_s))
        non_reaction = np.array(
            [c for c in range(N_BLENDSHAPES) if c not in set(profile.reaction_channels)]
        )
        for _ in range(n_events):
            channel = int(rng.choice(non_reaction))
            length = float(rng.uniform(*behavior.distractor_len_s))
            start = float(rng.uniform(0.0, max(0.05, spec.duration_s - length)))
            amp = float(rng.uniform(*behavior.distractor_amp) * profile.reaction_gain)
            distractors.append((channel, start, length, amp))

    angle_gain = min(1.5, profile.reaction_gain / 400.0)

    def states_at(
        timestamps: np.ndarray, noise_rng: np.random.Generator | None = None
    ) -> np.ndarray:
        t = np.asarray(timestamps, dtype=np.float64)
        states = np.tile(profile.base_state, (len(t), 1))
        for h in range(2):
            states += micro_a[:, h][None, :] * np.sin(
                2.0 * np.pi * micro_f[:, h][None, :] * t[:, None] + micro_p[:, h][None, :]
            )
        for k, a in enumerate(ANGLE_IDX):
            states[:, a] += behavior.drift_amp_deg * np.sin(
                2.0 * np.pi * drift_f[k] * t + drift_p[k]
            )

        if spec.kind != "control":
            env = reaction_envelope(t - spec.failure_onset_s, behavior)
            burst = profile.reaction_gain * env
            for c in profile.reaction_channels:
                states[:, c] += reaction_scale[c] * burst
            # mild head jerk rides along with the reaction
            states[:, N_BLENDSHAPES] += 5.0 * angle_gain * env
            states[:, N_BLENDSHAPES + 1] -= 3.5 * angle_gain * env

        for channel, start, length, amp in distractors:
            inside = (t >= start) & (t <= start + length)
            if np.any(inside):
                phase = (t[inside] - start) / length
                states[inside, channel] += amp * np.sin(np.pi * phase) ** 2

        if noise_rng is not None and profile.noise_sigma > 0:
            states += noise_rng.normal(0.0, profile.noise_sigma, size=states.shape)
        states[:, :N_BLENDSHAPES] = np.clip(states[:, :N_BLENDSHAPES], 0.0, 1000.0)
        states[:, N_BLENDSHAPES:] = np.clip(states[:, N_BLENDSHAPES:], -90.0, 90.0)
        return states

    return states_at
