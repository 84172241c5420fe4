"""Experiment layer: fold plans, cross-participant runs, transfer, sweep."""

import numpy as np
import pytest

from necksense.detectors import DetectorSchedule, DetectorSpec
from necksense.errors import DataError, InvalidArgumentError
from necksense.protocols import (
    ExperimentReport,
    FoldPlan,
    build_fold_windows,
    make_participant_folds,
    run_cross_participant,
    run_single_participant_sweep,
    run_transfer,
    scan_report_leakage,
)

MR_SPEC = DetectorSpec(arch="minirocket", feature_dim=55, interval_len=36,
                       mr_num_features=504)
FAST = DetectorSchedule(epochs=3, batch_size=64, lr=2e-3)


def test_fold_plan_properties():
    roster = [f"P{i:02d}" for i in range(1, 26)]
    plan = make_participant_folds(roster, n_folds=5, seed=3)
    assert plan.n_folds == 5
    assert list(plan.participants()) == sorted(roster)
    seen_tests = []
    for fold in plan.folds:
        assert len(fold.train) == 17
        assert len(fold.val) == 5
        assert len(fold.test) == 3
        combined = set(fold.train) | set(fold.val) | set(fold.test)
        assert len(combined) == 25
        seen_tests.append(set(fold.test))
    for i in range(5):
        for j in range(i + 1, 5):
            assert not (seen_tests[i] & seen_tests[j])
    again = make_participant_folds(roster, n_folds=5, seed=3)
    assert again.to_dict() == plan.to_dict()
    different = make_participant_folds(roster, n_folds=5, seed=4)
    assert different.to_dict() != plan.to_dict()


def test_fold_plan_small_roster():
    plan = make_participant_folds(["A", "B", "C", "D", "E"], n_folds=5, seed=0)
    for fold in plan.folds:
        assert len(fold.test) == 1
        assert len(fold.val) == 1
        assert len(fold.train) == 3


def test_fold_plan_errors():
    with pytest.raises(InvalidArgumentError):
        make_participant_folds(["A", "A", "B"], n_folds=2, seed=0)
    with pytest.raises(InvalidArgumentError):
        make_participant_folds(["A", "B"], n_folds=5, seed=0)
    with pytest.raises(InvalidArgumentError):
        make_participant_folds(list("ABCDE"), n_folds=5, seed=0, split=(0.5, 0.2, 0.2))


def test_fold_plan_rejects_overlap_by_construction():
    from necksense.protocols import FoldAssignment

    with pytest.raises(InvalidArgumentError):
        FoldPlan(
            folds=(
                FoldAssignment(fold=0, train=("A", "B"), val=("C",), test=("C",)),
            ),
            n_folds=1,
            seed=0,
        )


def test_build_fold_windows_no_leakage(sep_datasets):
    ds = sep_datasets["neck"]
    plan = make_participant_folds(ds.participants(), n_folds=3, seed=1)
    fw = build_fold_windows(ds, plan.folds[0], interval_len=36,
                            stride_train=3, stride_eval=5)
    train_p = set(w[0] for w in fw.train.origins)
    test_p = set(w[0] for w in fw.test.origins)
    assert train_p <= set(plan.folds[0].train)
    assert test_p <= set(plan.folds[0].test)
    assert not (train_p & test_p)
    assert fw.train.stride == 3
    assert fw.test.stride == 5


def test_build_fold_windows_pca(sep_datasets):
    ds = sep_datasets["neck"]
    plan = make_participant_folds(ds.participants(), n_folds=3, seed=1)
    fw = build_fold_windows(ds, plan.folds[0], interval_len=36,
                            stride_train=3, stride_eval=5, var_threshold=0.95)
    assert fw.pca is not None
    m = fw.pca["n_components"]
    assert 1 <= m < 55
    assert fw.train.X.shape[1] == m
    assert fw.test.X.shape[1] == m
    assert fw.pca["explained"] >= 0.95


def test_run_cross_participant_shapes(sep_datasets):
    report = run_cross_participant(
        sep_datasets["neck"], MR_SPEC, FAST,
        stride_train=3, stride_eval=5, margin_k=2, n_folds=3, seed=0,
    )
    assert report.protocol == "cross_participant"
    assert len(report.folds) == 3
    for entry in report.folds:
        assert set(entry["participants"]) == {"train", "val", "test"}
        assert 0.0 <= entry["test"]["accuracy"] <= 1.0
        assert "margin" in entry["test"]
        assert entry["baseline"] is not None
    metrics = report.summary["metrics"]
    assert set(metrics) >= {"accuracy", "f1"}
    assert "mean" in metrics["accuracy"] and "sd" in metrics["accuracy"]
    # separable corpus: the oracle and the detector should both be strong
    assert metrics["accuracy"]["mean"] >= 0.9
    # serialization roundtrip
    clone = ExperimentReport.from_dict(report.to_dict())
    assert clone.summary == report.summary
    assert clone.folds == report.folds


def test_run_cross_participant_grid_selects_best(sep_datasets):
    report = run_cross_participant(
        sep_datasets["neck"], MR_SPEC, FAST,
        grid=[{"mr_num_features": 252}, {"mr_num_features": 504}],
        stride_train=3, stride_eval=5, n_folds=3, seed=0,
    )
    assert len(report.grid) == 2
    accs = [row["metrics"]["accuracy"]["mean"] for row in report.grid]
    chosen = report.summary["selected_overrides"]
    assert report.grid[int(np.argmax(accs))]["overrides"] == chosen
    for row in report.grid:
        assert len(row["folds"]) == 3


def test_run_cross_participant_grid_cap(sep_datasets):
    big = [{"mr_num_features": 84 * (i + 1)} for i in range(13)]
    with pytest.raises(InvalidArgumentError):
        run_cross_participant(
            sep_datasets["neck"], MR_SPEC, FAST, grid=big,
            stride_train=3, stride_eval=5, n_folds=3, seed=0,
        )


def test_leakage_scan_clean_and_dirty(sep_datasets):
    report = run_cross_participant(
        sep_datasets["neck"], MR_SPEC, FAST,
        stride_train=3, stride_eval=5, n_folds=3, seed=0,
    )
    result = scan_report_leakage(report)
    assert result["checked_folds"] == 3
    assert result["violations"] == []
    # corrupt a fold: pretend a test participant also fed training windows
    doc = report.to_dict()
    test_pid = doc["folds"][0]["participants"]["test"][0]
    doc["folds"][0]["window_participants"]["train"].append(test_pid)
    dirty = scan_report_leakage(doc)
    assert dirty["violations"]
    assert any(v["fold"] == 0 for v in dirty["violations"])


def test_run_transfer_frozen_cross_dimension(sep_datasets):
    spec = DetectorSpec(arch="gru_fcn", feature_dim=55, interval_len=36,
                        hidden=32, dropout=0.3, dropout_fc=0.2)
    report = run_transfer(
        sep_datasets["neck"], sep_datasets["open"], spec, FAST,
        stride_train=3, stride_eval=5, n_folds=3, seed=0,
    )
    assert report.protocol == "transfer"
    assert report.summary["all_trunks_frozen"] is True
    for entry in report.folds:
        assert entry["frozen_identical"] is True
        assert entry["majority_baseline"]["accuracy"] is not None
        assert entry["parent_fingerprint"] != entry["detector_fingerprint"]
    assert report.summary["majority_accuracy"]["mean"] is not None
    assert report.extras["direction"] == "neck->open"
    assert len(report.extras["parent_fingerprints"]) == 3


def test_run_transfer_validates_roster(sep_datasets):
    ds = sep_datasets["neck"]
    missing = ds.for_participants(ds.participants()[:2])
    with pytest.raises(InvalidArgumentError):
        run_transfer(
            ds, sep_datasets["open"].for_participants(ds.participants()[2:]),
            MR_SPEC, FAST, stride_train=3, stride_eval=5, n_folds=2, seed=0,
        )


def test_run_sweep_budget_rows(sep_datasets):
    report = run_single_participant_sweep(
        sep_datasets["neck"], MR_SPEC, FAST,
        budgets=(0.25, 0.45), stride=3, margin_k=0, seed=0,
    )
    assert report.protocol == "single_participant_sweep"
    by_budget = report.summary["by_budget"]
    assert set(by_budget) == {"0.25", "0.45"}
    for key, cell in by_budget.items():
        assert cell["n"] >= 1
        assert cell["metrics"] is None or "accuracy" in cell["metrics"]
    for row in report.folds:
        assert row["n_train_windows"] >= 1
        assert row["n_test_windows"] >= 1
        total = row["n_train_windows"] + row["n_val_windows"] + row["n_test_windows"]
        assert total == row["n_windows"]
        assert row["budget"] in (0.25, 0.45)
    # every row's windows come from a single participant
    pids = {row["participant"] for row in report.folds}
    assert pids <= set(sep_datasets["neck"].participants())


def test_sweep_skips_are_recorded(sep_datasets):
    from dataclasses import replace

    from necksense.synthetic.reactions import ReactionDataset

    # trim each participant to a handful of windows so a large (but valid)
    # budget leaves nothing to test on
    trimmed = []
    for pid in sep_datasets["neck"].participants():
        seqs = [s for s in sep_datasets["neck"].sequences if s.participant_id == pid]
        s = seqs[0]
        cut = 36 + 3  # two windows at stride 3
        trimmed.append(
            type(s)(
                participant_id=s.participant_id,
                stimulus_id=s.stimulus_id,
                kind=s.kind,
                timestamps=s.timestamps[:cut],
                features=s.features[:cut],
                labels=s.labels[:cut],
            )
        )
    tiny = ReactionDataset("neck", 55, trimmed)
    report = run_single_participant_sweep(
        tiny, MR_SPEC, FAST, budgets=(0.75,), stride=3, margin_k=0, seed=0,
    )
    assert report.skipped
    assert not report.folds
    for skip in report.skipped:
        assert skip["reason"]
    with pytest.raises(InvalidArgumentError):
        run_single_participant_sweep(
            sep_datasets["neck"], MR_SPEC, FAST, budgets=(0.99,), stride=3, seed=0,
        )


def test_cross_participant_minirocket_reproducible(sep_datasets):
    a = run_cross_participant(
        sep_datasets["neck"], MR_SPEC, FAST,
        stride_train=3, stride_eval=5, n_folds=3, seed=7,
    )
    b = run_cross_participant(
        sep_datasets["neck"], MR_SPEC, FAST,
        stride_train=3, stride_eval=5, n_folds=3, seed=7,
    )
    assert a.summary["metrics"] == b.summary["metrics"]
    assert [e["detector_fingerprint"] for e in a.folds] == [
        e["detector_fingerprint"] for e in b.folds
    ]
