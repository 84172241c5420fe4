"""Reaction feature streams derived from stimulus sessions.

Two analog datasets per corpus: "neck" is the 55-dim truth stream plus
reconstruction noise (what the face-mapping CNN would emit); "open" is a
49-dim stream from a fixed seeded linear map over the same latent motion,
sampled at 30 fps with its own noise and nearest-aligned down to the
12 fps label grid. Same reactions, different sensors — the transfer pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgumentError
from ..reaction import (
    ReactionSequence,
    TARGET_FPS,
    align_stream,
    frame_keep_labels,
    label_frames,
)
from ..registry import STATE_DIM
from ..seeding import rng_for
from .motion import stimulus_motion
from .profiles import BehaviorConfig, ParticipantProfile
from .sessions import SyntheticSession
from .stimuli import StimulusSpec

OPEN_DIM = 49
OPEN_FPS = 30


@dataclass(frozen=True, eq=False)
class OpenMap:
    weights: np.ndarray  # (49, 55)
    bias: np.ndarray  # (49,)


def make_open_map(seed: int) -> OpenMap:
    rng = rng_for(seed, "open-map")
    w = rng.normal(0.0, 1.0, size=(OPEN_DIM, STATE_DIM)) / np.sqrt(STATE_DIM)
    return OpenMap(weights=w * 300.0, bias=rng.uniform(150.0, 350.0, size=OPEN_DIM))


def _normalize(states: np.ndarray) -> np.ndarray:
    z = np.asarray(states, dtype=np.float64).copy()
    z[:, :52] /= 1000.0
    z[:, 52:] /= 90.0
    return z


def neck_sequence(
    session: SyntheticSession, seed: int, behavior: BehaviorConfig
) -> ReactionSequence:
    """Kept-frame truth states + reconstruction noise, 12 fps."""
    spec = session.stimulus
    if spec is None:
        raise InvalidArgumentError("neck sequences come from stimulus sessions")
    feats = session.truth_states.astype(np.float64)
    if behavior.recon_sigma > 0:
        rng = rng_for(seed, "recon-noise", session.profile.participant_id, spec.stimulus_id)
        feats = feats + rng.normal(0.0, behavior.recon_sigma, size=feats.shape)
    return label_frames(
        session.timestamps,
        feats.astype(np.float32),
        spec,
        participant_id=session.profile.participant_id,
    )


def open_sequence(
    profile: ParticipantProfile,
    spec: StimulusSpec,
    seed: int,
    behavior: BehaviorConfig,
    open_map: OpenMap,
) -> ReactionSequence:
    """49-dim analog: 30 fps latent sampling -> linear map -> 12 fps align."""
    n30 = int(round(spec.duration_s * OPEN_FPS))
    t30 = np.arange(n30, dtype=np.float64) / OPEN_FPS
    motion = stimulus_motion(profile, spec, seed, behavior)
    latent = motion(t30, rng_for(seed, "open-latent-noise", profile.participant_id, spec.stimulus_id))
    feats30 = _normalize(latent) @ open_map.weights.T + open_map.bias
    if behavior.open_noise > 0:
        rng = rng_for(seed, "open-noise", profile.participant_id, spec.stimulus_id)
        feats30 = feats30 + rng.normal(0.0, behavior.open_noise, size=feats30.shape)
    feats12, idx = align_stream(feats30.astype(np.float32), OPEN_FPS, TARGET_FPS)
    t12 = np.arange(len(idx), dtype=np.float64) / TARGET_FPS
    keep, labels = frame_keep_labels(t12, spec)
    return ReactionSequence(
        participant_id=profile.participant_id,
        stimulus_id=spec.stimulus_id,
        kind=spec.kind,
        timestamps=t12[keep],
        features=feats12[keep],
        labels=labels[keep],
    )


@dataclass
class ReactionDataset:
    name: str  # neck | open
    feature_dim: int
    sequences: list[ReactionSequence]

    def participants(self) -> list[str]:
        return sorted({s.participant_id for s in self.sequences})

    def for_participants(self, participants) -> "ReactionDataset":
        wanted = set(participants)
        return ReactionDataset(
            name=self.name,
            feature_dim=self.feature_dim,
            sequences=[s for s in self.sequences if s.participant_id in wanted],
        )

    def frame_class_counts(self) -> tuple[int, int]:
        neutral = sum(int(np.sum(s.labels == 0)) for s in self.sequences)
        error = sum(int(np.sum(s.labels == 1)) for s in self.sequences)
        return neutral, error


def build_reaction_datasets(
    profiles: list[ParticipantProfile],
    specs: list[StimulusSpec],
    seed: int,
    behavior: BehaviorConfig = BehaviorConfig(),
    include_open: bool = True,
) -> dict[str, ReactionDataset]:
    """In-memory neck (and optionally open) datasets for a whole roster."""
    from .sessions import gen_stimulus_session

    neck: list[ReactionSequence] = []
    open_seqs: list[ReactionSequence] = []
    open_map = make_open_map(seed)
    for profile in profiles:
        for spec in specs:
            session = gen_stimulus_session(profile, spec, seed, behavior)
            neck.append(neck_sequence(session, seed, behavior))
            if include_open:
                open_seqs.append(open_sequence(profile, spec, seed, behavior, open_map))
    out = {"neck": ReactionDataset("neck", STATE_DIM, neck)}
    if include_open:
        out["open"] = ReactionDataset("open", OPEN_DIM, open_seqs)
    return out
