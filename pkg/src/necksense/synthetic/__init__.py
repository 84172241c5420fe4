"""Synthetic stand-in for the human capture campaign.

Seeded generators produce participants (anatomy + reaction style),
calibration sessions (paired IR frames with ground-truth face states),
and stimulus sessions (reaction streams with known error onsets), plus a
brute-force threshold oracle. Everything is a pure function of
(inputs, seed): regeneration is bit-identical.
"""

from .oracle import DegenerateLabelsError, ThresholdOracleResult, oracle_threshold_detector
from .profiles import BehaviorConfig, ParticipantProfile, gen_profiles
from .anatomy import render_frame_pair, render_view
from .corpus import (
    CorpusConfig,
    corpus_profiles,
    corpus_reaction_datasets,
    corpus_stimuli,
    default_corpus_config,
    gen_corpus,
    load_calibration_truth,
    load_reaction_dataset,
    separable_corpus_config,
)
from .reactions import (
    OPEN_DIM,
    ReactionDataset,
    build_reaction_datasets,
    make_open_map,
    neck_sequence,
    open_sequence,
)
from .sessions import (
    FramePair,
    FramePairSequence,
    SyntheticSession,
    gen_calibration_session,
    gen_stimulus_session,
)
from .stimuli import StimulusSpec, default_stimulus_set

__all__ = [
    "BehaviorConfig",
    "ParticipantProfile",
    "gen_profiles",
    "render_frame_pair",
    "StimulusSpec",
    "default_stimulus_set",
    "FramePair",
    "FramePairSequence",
    "SyntheticSession",
    "gen_calibration_session",
    "gen_stimulus_session",
    "ReactionDataset",
    "build_reaction_datasets",
    "CorpusConfig",
    "default_corpus_config",
    "separable_corpus_config",
    "corpus_profiles",
    "corpus_stimuli",
    "corpus_reaction_datasets",
    "gen_corpus",
    "load_reaction_dataset",
    "load_calibration_truth",
    "make_open_map",
    "neck_sequence",
    "open_sequence",
    "OPEN_DIM",
    "render_view",
    "DegenerateLabelsError",
    "ThresholdOracleResult",
    "oracle_threshold_detector",
]
