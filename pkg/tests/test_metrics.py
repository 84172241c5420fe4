"""Metric functions against naive re-implementations and edge cases."""

import numpy as np
import pytest

from necksense.errors import InvalidArgumentError
from necksense.metrics import (
    mae_face,
    macro_metrics,
    margin_corrected_labels,
    margin_metrics,
    margin_metrics_grouped,
)
from necksense.registry import N_BLENDSHAPES, STATE_DIM


def naive_mae_face(pred, truth):
    diffs_f, diffs_o = [], []
    for p, t in zip(pred, truth):
        diffs_f.append(sum(abs(p[i] - t[i]) for i in range(N_BLENDSHAPES)) / N_BLENDSHAPES)
        diffs_o.append(
            sum(abs(p[i] - t[i]) for i in range(N_BLENDSHAPES, STATE_DIM))
            / (STATE_DIM - N_BLENDSHAPES)
        )
    return sum(diffs_f) / len(diffs_f), sum(diffs_o) / len(diffs_o)


def naive_macro(pred, true):
    acc = sum(int(p == t) for p, t in zip(pred, true)) / len(pred)
    precs, recs, f1s = [], [], []
    for cls in (0, 1):
        tp = sum(1 for p, t in zip(pred, true) if p == cls and t == cls)
        fp = sum(1 for p, t in zip(pred, true) if p == cls and t != cls)
        fn = sum(1 for p, t in zip(pred, true) if p != cls and t == cls)
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        f1s.append(2 * prec * rec / (prec + rec) if prec + rec else 0.0)
        precs.append(prec)
        recs.append(rec)
    return acc, np.mean(precs), np.mean(recs), np.mean(f1s)


def naive_margin_labels(pred, true, k):
    out = list(true)
    for i in range(len(pred)):
        window = true[max(0, i - k) : i + k + 1]
        if pred[i] in list(window):
            out[i] = pred[i]
    return np.array(out)


def test_mae_face_matches_naive(rng):
    for _ in range(50):
        n = int(rng.integers(1, 20))
        pred = rng.uniform(-50, 1050, size=(n, STATE_DIM))
        truth = rng.uniform(-50, 1050, size=(n, STATE_DIM))
        got = mae_face(pred, truth)
        want = naive_mae_face(pred, truth)
        assert got[0] == pytest.approx(want[0], abs=1e-9)
        assert got[1] == pytest.approx(want[1], abs=1e-9)


def test_mae_face_rejects_bad_shapes():
    with pytest.raises(InvalidArgumentError):
        mae_face(np.zeros((2, STATE_DIM)), np.zeros((3, STATE_DIM)))
    with pytest.raises(InvalidArgumentError):
        mae_face(np.zeros((2, 10)), np.zeros((2, 10)))
    with pytest.raises(InvalidArgumentError):
        mae_face(np.zeros((0, STATE_DIM)), np.zeros((0, STATE_DIM)))


def test_mae_face_accepts_single_vector():
    f, o = mae_face(np.zeros(STATE_DIM), np.ones(STATE_DIM))
    assert f == pytest.approx(1.0)
    assert o == pytest.approx(1.0)


def test_macro_metrics_matches_naive(rng):
    for _ in range(100):
        n = int(rng.integers(1, 60))
        pred = rng.integers(0, 2, size=n)
        true = rng.integers(0, 2, size=n)
        report = macro_metrics(pred, true)
        acc, prec, rec, f1 = naive_macro(pred, true)
        assert report.accuracy == pytest.approx(acc, abs=1e-12)
        assert report.precision == pytest.approx(prec, abs=1e-12)
        assert report.recall == pytest.approx(rec, abs=1e-12)
        assert report.f1 == pytest.approx(f1, abs=1e-12)


def test_macro_metrics_single_class_absent():
    report = macro_metrics([0, 0, 0], [0, 0, 0])
    assert report.accuracy == 1.0
    # class 1 never appears: its precision/recall are defined as 0
    assert report.precision == pytest.approx(0.5)
    assert report.per_class[1]["tp"] == 0


def test_labels_validated():
    with pytest.raises(InvalidArgumentError):
        macro_metrics([0, 2], [0, 1])
    with pytest.raises(InvalidArgumentError):
        macro_metrics([], [])


def test_margin_zero_is_plain(rng):
    for _ in range(30):
        n = int(rng.integers(1, 50))
        pred = rng.integers(0, 2, size=n)
        true = rng.integers(0, 2, size=n)
        assert np.array_equal(margin_corrected_labels(pred, true, 0), true)
        m0 = margin_metrics(pred, true, 0)
        plain = macro_metrics(pred, true)
        assert m0.accuracy == plain.accuracy
        assert m0.f1 == plain.f1


def test_margin_matches_naive_and_monotone(rng):
    for _ in range(50):
        n = int(rng.integers(1, 60))
        pred = rng.integers(0, 2, size=n)
        true = rng.integers(0, 2, size=n)
        prev = -1.0
        for k in (0, 1, 2, 3, 5):
            got = margin_corrected_labels(pred, true, k)
            assert np.array_equal(got, naive_margin_labels(pred, true, k))
            acc = margin_metrics(pred, true, k).accuracy
            assert acc >= prev - 1e-12
            prev = acc


def test_margin_rejects_negative_k():
    with pytest.raises(InvalidArgumentError):
        margin_corrected_labels([0], [0], -1)


def test_grouped_margin_stops_at_boundaries():
    # two recordings; the prediction flips exactly at the join
    pred = np.array([1, 1, 0, 0])
    true = np.array([0, 0, 1, 1])
    groups = np.array(["a", "a", "b", "b"])
    # ungrouped with k=2 lets corrections cross the join
    loose = margin_metrics(pred, true, 2)
    tight = margin_metrics_grouped(pred, true, groups, 2)
    assert loose.accuracy == 1.0
    assert tight.accuracy == 0.0


def test_grouped_margin_equals_ungrouped_single_group(rng):
    pred = rng.integers(0, 2, size=40)
    true = rng.integers(0, 2, size=40)
    groups = np.zeros(40, dtype=int)
    a = margin_metrics(pred, true, 3)
    b = margin_metrics_grouped(pred, true, groups, 3)
    assert a.accuracy == b.accuracy
    assert a.f1 == b.f1
