"""Window extraction against exhaustive enumeration, plus stream alignment."""

import numpy as np
import pytest

from necksense.errors import DataError, InvalidArgumentError
from necksense.reaction import (
    ReactionSequence,
    WindowSet,
    align_stream,
    build_window_set,
    frame_keep_labels,
    label_frames,
    make_windows,
)
from necksense.synthetic.stimuli import StimulusSpec


def naive_windows(labels, interval_len, stride):
    T = len(labels)
    out = []
    start = 0
    while start + interval_len <= T:
        chunk = labels[start : start + interval_len]
        ones = int(np.sum(chunk))
        label = 1 if 2 * ones >= interval_len else 0
        out.append((start, label))
        start += stride
    return out


def _sequence(labels, pid="P00", sid="H01"):
    T = len(labels)
    feats = np.arange(T * 4, dtype=np.float32).reshape(T, 4)
    ts = np.arange(T, dtype=np.float64) / 12.0
    return ReactionSequence(
        participant_id=pid,
        stimulus_id=sid,
        kind="human_error",
        timestamps=ts,
        features=feats,
        labels=np.asarray(labels, dtype=np.int8),
    )


def test_make_windows_matches_enumeration(rng):
    for _ in range(300):
        T = int(rng.integers(0, 200))
        interval_len = int(rng.integers(1, 90))
        stride = int(rng.integers(1, 12))
        labels = rng.integers(0, 2, size=T)
        seq = _sequence(labels)
        got = make_windows(seq, interval_len, stride)
        want = naive_windows(labels, interval_len, stride)
        assert len(got) == len(want)
        for w, (start, label) in zip(got, want):
            assert w.origin == ("P00", "H01", start)
            assert w.label == label
            assert np.array_equal(w.matrix, seq.features[start : start + interval_len].T)


def test_make_windows_tie_is_error():
    seq = _sequence([0, 1, 0, 1])
    wins = make_windows(seq, 4, 4)
    assert len(wins) == 1
    assert wins[0].label == 1


def test_make_windows_short_sequence_empty():
    seq = _sequence([0, 1])
    assert make_windows(seq, 3, 1) == []


def test_make_windows_validates():
    seq = _sequence([0, 1, 0])
    with pytest.raises(InvalidArgumentError):
        make_windows(seq, 0, 1)
    with pytest.raises(InvalidArgumentError):
        make_windows(seq, 3, 0)


def test_sequence_rejects_labeled_control():
    with pytest.raises(InvalidArgumentError):
        ReactionSequence(
            participant_id="P00",
            stimulus_id="C01",
            kind="control",
            timestamps=np.arange(3) / 12.0,
            features=np.zeros((3, 2), dtype=np.float32),
            labels=np.array([0, 1, 0]),
        )


def test_frame_keep_labels_control():
    spec = StimulusSpec(stimulus_id="C01", kind="control", duration_s=5.0, failure_onset_s=None)
    keep, labels = frame_keep_labels(np.arange(60) / 12.0, spec)
    assert np.all(keep)
    assert not np.any(labels)


def test_frame_keep_labels_error_onset():
    spec = StimulusSpec(stimulus_id="H01", kind="human_error", duration_s=5.0, failure_onset_s=2.0)
    ts = np.arange(60) / 12.0
    keep, labels = frame_keep_labels(ts, spec)
    assert np.array_equal(keep, ts >= 2.0)
    assert np.all(labels[keep] == 1)
    got = label_frames(ts, np.zeros((60, 3)), spec, participant_id="P07")
    assert got.n_frames == int(np.sum(keep))
    assert np.all(got.labels == 1)
    assert got.participant_id == "P07"


def test_build_window_set_groups_and_orders(sep_datasets):
    ds = sep_datasets["neck"]
    ws = build_window_set(ds.sequences, interval_len=36, stride=5)
    assert len(ws.y) == ws.n_windows > 0
    assert ws.X.shape == (ws.n_windows, ds.sequences[0].feature_dim, 36)
    assert set(np.unique(ws.y)) <= {0, 1}
    # origins are sorted by (participant, stimulus, offset)
    assert ws.origins == sorted(ws.origins)
    pids = ws.participants()
    sub = ws.for_participants([pids[0]])
    assert sub.participants() == [pids[0]]
    assert 0 < sub.n_windows < ws.n_windows
    n0, n1 = ws.class_counts()
    assert n0 + n1 == ws.n_windows


def test_window_set_save_load_roundtrip(tmp_path, sep_windows):
    path = tmp_path / "w.npz"
    sep_windows.save(path)
    clone = WindowSet.load(path)
    assert np.array_equal(clone.X, sep_windows.X)
    assert np.array_equal(clone.y, sep_windows.y)
    assert clone.origins == sep_windows.origins
    assert clone.interval_len == sep_windows.interval_len
    with pytest.raises(DataError):
        WindowSet.load(tmp_path / "missing.npz")


def test_align_stream_downsamples_nearest():
    src = np.arange(30, dtype=np.float64)[:, None]
    out, idx = align_stream(src, src_fps=30.0, target_fps=12.0)
    assert len(out) == len(idx) == 12
    times = np.arange(30) / 30.0
    grid = np.arange(12) / 12.0
    for i, t in zip(idx, grid):
        best = np.min(np.abs(times - t))
        assert abs(times[i] - t) == pytest.approx(best, abs=1e-12)
    # picked rows really come from the source
    assert np.array_equal(out[:, 0], idx.astype(np.float64))


def test_align_stream_identity_when_rates_match():
    src = np.random.default_rng(3).normal(size=(24, 2))
    out, idx = align_stream(src, src_fps=12.0, target_fps=12.0)
    assert np.array_equal(out, src)
    assert np.array_equal(idx, np.arange(24))


def test_align_stream_refuses_upsampling():
    with pytest.raises(InvalidArgumentError):
        align_stream(np.zeros((5, 1)), src_fps=6.0, target_fps=12.0)
