"""Synthetic world: rosters, videos, sessions, corpus files, oracle."""

import numpy as np
import pytest

from necksense.errors import DataError, InvalidArgumentError
from necksense.manifest import load_manifest, verify_manifest
from necksense.registry import N_BLENDSHAPES, STATE_DIM
from necksense.synthetic import (
    BehaviorConfig,
    DegenerateLabelsError,
    corpus_reaction_datasets,
    default_corpus_config,
    default_stimulus_set,
    gen_calibration_session,
    gen_profiles,
    gen_stimulus_session,
    load_calibration_truth,
    load_reaction_dataset,
    oracle_threshold_detector,
    separable_corpus_config,
)


def test_profiles_deterministic_and_distinct():
    a = gen_profiles(6, seed=42)
    b = gen_profiles(6, seed=42)
    c = gen_profiles(6, seed=43)
    assert [p.participant_id for p in a] == [f"P{i:02d}" for i in range(1, 7)]
    for pa, pb in zip(a, b):
        assert pa.reaction_gain == pb.reaction_gain
        assert pa.reaction_channels == pb.reaction_channels
        assert np.array_equal(pa.base_state, pb.base_state)
    assert any(
        pa.reaction_channels != pc.reaction_channels for pa, pc in zip(a, c)
    )


def test_profile_gain_ladder_spread():
    profiles = gen_profiles(12, seed=3, gain_lo=150.0, gain_ratio=4.0)
    gains = np.array([p.reaction_gain for p in profiles])
    assert gains.max() / gains.min() >= 3.0
    assert gains.min() >= 150.0 * 0.9 - 1e-9


def test_profiles_shared_channels():
    profiles = gen_profiles(5, seed=9, channels_mode="shared")
    first = profiles[0].reaction_channels
    assert all(p.reaction_channels == first for p in profiles)
    assert all(0 <= c < N_BLENDSHAPES for c in first)


def test_stimulus_set_composition():
    specs = default_stimulus_set(seed=5, n_control=4, n_human=3, n_robot=2)
    kinds = [s.kind for s in specs]
    assert kinds.count("control") == 4
    assert kinds.count("human_error") == 3
    assert kinds.count("robot_error") == 2
    for s in specs:
        if s.kind == "control":
            assert s.failure_onset_s is None
        else:
            assert 0.0 <= s.failure_onset_s < s.duration_s
    again = default_stimulus_set(seed=5, n_control=4, n_human=3, n_robot=2)
    assert [s.stimulus_id for s in again] == [s.stimulus_id for s in specs]
    assert [s.duration_s for s in again] == [s.duration_s for s in specs]


def test_stimulus_duration_scale():
    full = default_stimulus_set(seed=5, n_control=2, n_human=2, n_robot=0)
    short = default_stimulus_set(
        seed=5, n_control=2, n_human=2, n_robot=0, duration_scale=0.5
    )
    for f, s in zip(full, short):
        assert s.duration_s == pytest.approx(f.duration_s * 0.5)


def test_calibration_session_shapes():
    profile = gen_profiles(1, seed=21)[0]
    session = gen_calibration_session(
        profile, duration_s=5.0, fps=12, seed=0, height=60, width=80
    )
    n = session.n_frames
    assert n == 60
    assert session.truth_states.shape == (n, STATE_DIM)
    assert len(session.timestamps) == n
    pair = session.frames[0]
    assert pair.left.shape == (60, 80)
    assert pair.right.shape == (60, 80)
    assert 0.0 <= pair.left.min() and pair.left.max() <= 1.0
    assert np.array_equal(pair.left, session.frames[0].left)
    # same profile and seed reproduce bit-identical truth
    again = gen_calibration_session(
        profile, duration_s=5.0, fps=12, seed=0, height=60, width=80
    )
    assert np.array_equal(session.truth_states, again.truth_states)


def test_stimulus_session_drops_pre_onset_frames():
    profile = gen_profiles(1, seed=21)[0]
    spec = next(
        s for s in default_stimulus_set(seed=5, n_control=1, n_human=1, n_robot=0)
        if s.kind == "human_error"
    )
    session = gen_stimulus_session(profile, spec, seed=0)
    kept = session.timestamps[session.keep_mask]
    assert np.all(kept >= spec.failure_onset_s)
    assert np.all(session.labels[session.keep_mask] == 1)
    n_before = int(np.sum(~session.keep_mask))
    assert n_before > 0


def test_reaction_datasets_separable_by_threshold(sep_datasets):
    neck = sep_datasets["neck"]
    open_ds = sep_datasets["open"]
    assert neck.feature_dim == STATE_DIM
    assert open_ds.feature_dim == 49
    assert neck.participants() == open_ds.participants()
    result = oracle_threshold_detector(neck.sequences)
    assert result.train_metrics.accuracy >= 0.95
    # the oracle transfers across participants in the shared-channel regime
    roster = neck.participants()
    train = neck.for_participants(roster[:2]).sequences
    test = neck.for_participants(roster[2:]).sequences
    held = oracle_threshold_detector(train, test)
    assert held.test_metrics.accuracy >= 0.9


def test_oracle_needs_both_classes(sep_datasets):
    neck = sep_datasets["neck"]
    controls = [s for s in neck.sequences if s.kind == "control"]
    with pytest.raises(DegenerateLabelsError):
        oracle_threshold_detector(controls)
    with pytest.raises(InvalidArgumentError):
        oracle_threshold_detector([])


def test_default_corpus_harder_than_separable():
    sep = separable_corpus_config(n_participants=2, n_control=2, n_human=2, n_robot=0)
    hard = default_corpus_config(
        n_participants=2, n_control=2, n_human=2, n_robot=0
    )
    sep_ds = corpus_reaction_datasets(sep)["neck"]
    hard_ds = corpus_reaction_datasets(hard)["neck"]
    # cross-participant thresholding: near-perfect in the easy regime,
    # visibly degraded when channels and gains vary per participant
    def held_out_acc(ds):
        roster = ds.participants()
        res = oracle_threshold_detector(
            ds.for_participants(roster[:1]).sequences,
            ds.for_participants(roster[1:]).sequences,
        )
        return res.test_metrics.accuracy

    assert held_out_acc(sep_ds) > held_out_acc(hard_ds)


def test_corpus_files_roundtrip(rendered_corpus):
    root = rendered_corpus["root"]
    summary = rendered_corpus["summary"]
    neck = load_reaction_dataset(root, "neck")
    open_ds = load_reaction_dataset(root, "open")
    assert len(neck.sequences) == summary["n_participants"] * summary["n_videos"]
    n0, n1 = neck.frame_class_counts()
    assert n0 == summary["neutral_frames"]
    assert n1 == summary["error_frames"]
    assert len(open_ds.sequences) == len(neck.sequences)
    # stream rebuilt from disk matches the in-memory generator
    config = rendered_corpus["config"]
    mem = corpus_reaction_datasets(config)["neck"]
    by_key = {(s.participant_id, s.stimulus_id): s for s in mem.sequences}
    probe = neck.sequences[0]
    twin = by_key[(probe.participant_id, probe.stimulus_id)]
    assert np.allclose(probe.features, twin.features, atol=5e-5)
    assert np.array_equal(probe.labels, twin.labels)


def test_corpus_truth_uses_sentinel_for_dropped(rendered_corpus):
    import pandas as pd

    root = rendered_corpus["root"]
    data = root / "data"
    error_truths = sorted(data.glob("P*/stimulus/H*/truth.csv"))
    assert error_truths
    table = pd.read_csv(error_truths[0])
    assert set(table["label"]) <= {-1, 1}
    assert (table["label"] == -1).any()


def test_corpus_manifest_detects_tampering(rendered_corpus, tmp_path):
    import shutil

    root = rendered_corpus["root"]
    doc = verify_manifest(root)  # pristine copy passes
    assert doc["kind"] == "corpus"
    clone = tmp_path / "clone"
    shutil.copytree(root, clone)
    victim = next(iter(sorted(clone.glob("data/*/stimulus/*/neck.csv"))))
    text = victim.read_text().splitlines()
    text[1] = text[1].replace(text[1].split(",")[1], "999999.0", 1)
    victim.write_text("\n".join(text) + "\n")
    with pytest.raises(DataError):
        verify_manifest(clone)
    assert load_manifest(clone)["n_participants"] == 2


def test_calibration_truth_loads(rendered_corpus):
    root = rendered_corpus["root"]
    ts, states = load_calibration_truth(root, "P01")
    assert states.shape[1] == STATE_DIM
    assert len(ts) == len(states)
    with pytest.raises(DataError):
        load_calibration_truth(root, "P99")


def test_load_reaction_dataset_errors(tmp_path):
    with pytest.raises(DataError):
        load_reaction_dataset(tmp_path)
    with pytest.raises(InvalidArgumentError):
        load_reaction_dataset(tmp_path, "imu")


def test_pixel_noise_flag_changes_frames_not_truth():
    profile = gen_profiles(1, seed=2)[0]
    quiet = gen_calibration_session(
        profile, duration_s=4.0, fps=12, seed=0,
        behavior=BehaviorConfig(pixel_noise_per_unit=0.0), height=60, width=80,
    )
    noisy = gen_calibration_session(
        profile, duration_s=4.0, fps=12, seed=0,
        behavior=BehaviorConfig(), height=60, width=80,
    )
    assert np.array_equal(quiet.truth_states, noisy.truth_states)
    assert not np.array_equal(quiet.frames[3].left, noisy.frames[3].left)
