"""Experiment regimes over windowed reaction data.

Three regimes share one report shape:

- cross-participant: rotate participants through held-out test groups,
  optionally over a small hyperparameter grid, select by mean test accuracy;
- transfer: train on a source dataset per fold, fine-tune only the last
  layer on the target dataset, audit that the trunk stayed bit-identical;
- single-participant sweep: per participant, train on a small budget of
  that participant's own windows and test on the rest.

Every fold entry records which participants actually contributed windows
to each split so a later scan can prove no test participant leaked into
training.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .detectors import (
    Detector,
    DetectorSchedule,
    DetectorSpec,
    build_detector,
    detector_fingerprint,
    finetune_last_layer,
    predict,
    train_detector,
    trunk_state,
)
from .errors import DataError, InvalidArgumentError
from .metrics import MetricReport, macro_metrics, margin_metrics_grouped
from .nnutil import state_fingerprint
from .projection import apply_projector, fit_projector
from .reaction import WindowSet, build_window_set
from .registry import REGISTRY_VERSION
from .seeding import rng_for, seed_for
from .synthetic.oracle import DegenerateLabelsError, oracle_threshold_detector
from .synthetic.reactions import ReactionDataset

DEFAULT_INTERVAL_LEN = 80
DEFAULT_STRIDE_TRAIN = 3
DEFAULT_STRIDE_EVAL = 5
DEFAULT_SPLIT = (0.7, 0.2, 0.1)
SWEEP_BUDGETS = (0.05, 0.15, 0.25, 0.35, 0.45)
SWEEP_VAL_FRACTION = 0.20
MAX_GRID_COMBOS = 12


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


# ---------------------------------------------------------------------------
# fold plans


@dataclass(frozen=True)
class FoldAssignment:
    """One fold's participant partition."""

    fold: int
    train: tuple[str, ...]
    val: tuple[str, ...]
    test: tuple[str, ...]

    def roles(self) -> dict[str, tuple[str, ...]]:
        return {"train": self.train, "val": self.val, "test": self.test}


@dataclass(frozen=True)
class FoldPlan:
    folds: tuple[FoldAssignment, ...]
    n_folds: int
    seed: int

    def __post_init__(self):
        if len(self.folds) != self.n_folds:
            raise InvalidArgumentError("fold count disagrees with n_folds")
        seen_test: set[str] = set()
        for fa in self.folds:
            train, val, test = set(fa.train), set(fa.val), set(fa.test)
            if not test or not train:
                raise InvalidArgumentError(
                    f"fold {fa.fold} has an empty train or test group"
                )
            if (train & val) or (train & test) or (val & test):
                raise InvalidArgumentError(
                    f"fold {fa.fold} assigns a participant to two roles"
                )
            if seen_test & test:
                raise InvalidArgumentError(
                    f"fold {fa.fold} reuses a test participant from an earlier fold"
                )
            seen_test |= test

    def participants(self) -> tuple[str, ...]:
        first = self.folds[0]
        return tuple(sorted(first.train + first.val + first.test))

    def to_dict(self) -> dict:
        return {
            "n_folds": self.n_folds,
            "seed": self.seed,
            "folds": [
                {"fold": fa.fold, **{k: list(v) for k, v in fa.roles().items()}}
                for fa in self.folds
            ],
        }


@dataclass(frozen=True)
class SweepPlan:
    """Window budget for one participant: train on b, validate on 20%, test the rest."""

    participant_id: str
    budget: float
    val_fraction: float = SWEEP_VAL_FRACTION
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.budget and self.budget + self.val_fraction < 1.0):
            raise InvalidArgumentError(
                f"budget {self.budget} plus val fraction {self.val_fraction} "
                "must leave room for a test split"
            )


def make_participant_folds(
    participants,
    n_folds: int = 5,
    split: tuple[float, float, float] = DEFAULT_SPLIT,
    seed: int = 0,
) -> FoldPlan:
    """Rotate participants through disjoint test groups.

    Test size is the rounded test share of the roster, capped so that
    n_folds consecutive test blocks fit without overlap; the remaining
    participants split into val (rounded share) and train (everything
    else, absorbing the rounding remainder).
    """
    roster = [str(p) for p in participants]
    if len(set(roster)) != len(roster):
        raise InvalidArgumentError("duplicate participant ids in fold roster")
    n = len(roster)
    if n_folds < 1:
        raise InvalidArgumentError("n_folds must be at least 1")
    if n < n_folds:
        raise InvalidArgumentError(
            f"need at least {n_folds} participants for {n_folds} folds, got {n}"
        )
    if len(split) != 3 or any(s <= 0 for s in split) or abs(sum(split) - 1.0) > 1e-6:
        raise InvalidArgumentError("split must be three positive fractions summing to 1")

    test_size = min(max(1, _round_half_up(split[2] * n)), n // n_folds)
    val_size = max(1, _round_half_up(split[1] * n))
    if test_size + val_size >= n:
        val_size = n - test_size - 1
        if val_size < 1:
            raise InvalidArgumentError("roster too small for a train/val/test split")

    order = [str(p) for p in rng_for(seed, "fold-plan").permutation(sorted(roster))]
    folds = []
    for k in range(n_folds):
        lo = k * test_size
        test = tuple(order[lo : lo + test_size])
        rest = [order[(lo + test_size + i) % n] for i in range(n - test_size)]
        folds.append(
            FoldAssignment(
                fold=k,
                train=tuple(rest[val_size:]),
                val=tuple(rest[:val_size]),
                test=test,
            )
        )
    return FoldPlan(folds=tuple(folds), n_folds=n_folds, seed=seed)


# ---------------------------------------------------------------------------
# window assembly per fold


def _frames_matrix(dataset: ReactionDataset, participants) -> np.ndarray:
    wanted = set(participants)
    mats = [s.features for s in dataset.sequences if s.participant_id in wanted]
    if not mats:
        raise DataError(
            f"no sequences for participants {sorted(wanted)} in dataset {dataset.name}"
        )
    return np.concatenate(mats, axis=0)


def _project_window_set(ws: WindowSet, projector) -> WindowSet:
    return WindowSet(
        X=apply_projector(projector, ws.X),
        y=ws.y,
        origins=list(ws.origins),
        interval_len=ws.interval_len,
        stride=ws.stride,
        registry_version=ws.registry_version,
        extra=dict(ws.extra),
    )


def _assert_no_leakage(fold: int, train_ws: WindowSet, val_ws: WindowSet, test_ws: WindowSet):
    test_p = set(test_ws.participants())
    crossed = test_p & (set(train_ws.participants()) | set(val_ws.participants()))
    if crossed:
        raise DataError(
            f"fold {fold}: windows of test participants {sorted(crossed)} "
            "appear in train or val"
        )


@dataclass
class FoldWindows:
    """Materialized splits for one fold, plus the projector that shaped them."""

    assignment: FoldAssignment
    train: WindowSet
    val: WindowSet
    test: WindowSet
    pca: dict | None = None

    def counts(self) -> dict:
        return {
            "n_train_windows": self.train.n_windows,
            "n_val_windows": self.val.n_windows,
            "n_test_windows": self.test.n_windows,
            "train_class_counts": list(self.train.class_counts()),
            "test_class_counts": list(self.test.class_counts()),
        }

    def window_participants(self) -> dict:
        return {
            "train": self.train.participants(),
            "val": self.val.participants(),
            "test": self.test.participants(),
        }


def build_fold_windows(
    dataset: ReactionDataset,
    assignment: FoldAssignment,
    interval_len: int,
    stride_train: int = DEFAULT_STRIDE_TRAIN,
    stride_eval: int = DEFAULT_STRIDE_EVAL,
    var_threshold: float | None = None,
) -> FoldWindows:
    """Window one fold's splits; optionally project onto principal axes.

    The projector is fit on training participants' frames only, then
    applied to every split, so no statistic of val or test data feeds
    back into the representation.
    """
    seqs = dataset.sequences
    train_ws = build_window_set(seqs, interval_len, stride_train, assignment.train)
    val_ws = build_window_set(seqs, interval_len, stride_eval, assignment.val)
    test_ws = build_window_set(seqs, interval_len, stride_eval, assignment.test)
    _assert_no_leakage(assignment.fold, train_ws, val_ws, test_ws)

    pca = None
    if var_threshold is not None:
        projector = fit_projector(
            _frames_matrix(dataset, assignment.train), var_threshold
        )
        train_ws = _project_window_set(train_ws, projector)
        val_ws = _project_window_set(val_ws, projector)
        test_ws = _project_window_set(test_ws, projector)
        pca = {
            "var_threshold": var_threshold,
            "n_components": projector.n_components,
            "explained": projector.explained,
        }
    return FoldWindows(assignment, train_ws, val_ws, test_ws, pca)


# ---------------------------------------------------------------------------
# reports


@dataclass
class ExperimentReport:
    protocol: str
    config: dict
    folds: list[dict]
    summary: dict
    grid: list[dict] = field(default_factory=list)
    selected: dict | None = None
    skipped: list[dict] = field(default_factory=list)
    extras: dict = field(default_factory=dict)
    registry_version: str = REGISTRY_VERSION
    artifacts: dict = field(default_factory=dict, repr=False)  # never serialized

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "registry_version": self.registry_version,
            "config": self.config,
            "summary": self.summary,
            "selected": self.selected,
            "grid": self.grid,
            "folds": self.folds,
            "skipped": self.skipped,
            "extras": self.extras,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentReport":
        return cls(
            protocol=data["protocol"],
            config=data.get("config", {}),
            folds=data.get("folds", []),
            summary=data.get("summary", {}),
            grid=data.get("grid", []),
            selected=data.get("selected"),
            skipped=data.get("skipped", []),
            extras=data.get("extras", {}),
            registry_version=data.get("registry_version", REGISTRY_VERSION),
        )


def _mean_sd(values) -> dict:
    arr = np.asarray(list(values), dtype=np.float64)
    if arr.size == 0:
        return {"mean": float("nan"), "sd": float("nan"), "n": 0}
    sd = float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0
    return {"mean": float(np.mean(arr)), "sd": sd, "n": int(arr.size)}


def _metric_summary(reports: list[MetricReport]) -> dict:
    out = {}
    for name in ("accuracy", "precision", "recall", "f1"):
        out[name] = _mean_sd(getattr(r, name) for r in reports)
    return out


def _groups_of(ws: WindowSet) -> list[str]:
    return [f"{p}|{s}" for p, s, _ in ws.origins]


def _evaluate_windows(det: Detector, ws: WindowSet, margin_k: int) -> tuple[MetricReport, dict]:
    labels, _ = predict(det, ws)
    report = macro_metrics(labels, ws.y)
    as_dict = report.to_dict()
    if margin_k > 0:
        margin = margin_metrics_grouped(labels, ws.y, _groups_of(ws), margin_k)
        as_dict["margin"] = {str(margin_k): margin.to_dict()}
    return report, as_dict


def _spec_for_fold(
    spec: DetectorSpec, overrides: dict, fold_key: object, feature_dim: int, interval_len: int
) -> DetectorSpec:
    base = dataclasses.asdict(spec)
    unknown = set(overrides) - set(base)
    if unknown:
        raise InvalidArgumentError(
            f"unknown detector spec fields in grid overrides: {sorted(unknown)}"
        )
    base.update(overrides)
    base["feature_dim"] = feature_dim
    base["interval_len"] = interval_len
    base["seed"] = seed_for(spec.seed, "fold-spec", fold_key)
    return DetectorSpec(**base)


def _schedule_for_fold(schedule: DetectorSchedule, fold_key: object) -> DetectorSchedule:
    return dataclasses.replace(
        schedule, seed=seed_for(schedule.seed, "fold-sched", fold_key)
    )


def _dataset_config(dataset: ReactionDataset) -> dict:
    return {
        "name": dataset.name,
        "feature_dim": dataset.feature_dim,
        "n_sequences": len(dataset.sequences),
        "n_participants": len(dataset.participants()),
    }


def _fold_baseline(
    dataset: ReactionDataset, assignment: FoldAssignment
) -> dict | None:
    """Best single-channel threshold fit on train+val, scored on test frames."""
    wanted = set(assignment.train) | set(assignment.val)
    fit_seqs = [s for s in dataset.sequences if s.participant_id in wanted]
    test_seqs = [
        s for s in dataset.sequences if s.participant_id in set(assignment.test)
    ]
    try:
        result = oracle_threshold_detector(fit_seqs, test_seqs)
    except DegenerateLabelsError:
        return None
    return result.to_dict()


# ---------------------------------------------------------------------------
# regime 1: cross-participant


def run_cross_participant(
    dataset: ReactionDataset,
    spec: DetectorSpec,
    schedule: DetectorSchedule = DetectorSchedule(),
    plan: FoldPlan | None = None,
    *,
    grid: list[dict] | None = None,
    stride_train: int = DEFAULT_STRIDE_TRAIN,
    stride_eval: int = DEFAULT_STRIDE_EVAL,
    var_threshold: float | None = None,
    margin_k: int = 0,
    include_baseline: bool = True,
    n_folds: int = 5,
    seed: int = 0,
) -> ExperimentReport:
    """Train each configuration on every fold; select by mean test accuracy.

    The winning configuration's per-fold detectors are kept in
    ``report.artifacts["detectors"]`` for checkpointing.
    """
    if plan is None:
        plan = make_participant_folds(dataset.participants(), n_folds=n_folds, seed=seed)
    combos = [dict(g) for g in grid] if grid else [{}]
    if not combos:
        raise InvalidArgumentError("hyperparameter grid is empty")
    if len(combos) > MAX_GRID_COMBOS:
        raise InvalidArgumentError(
            f"grid has {len(combos)} combinations; cap is {MAX_GRID_COMBOS}"
        )

    fold_windows = [
        build_fold_windows(
            dataset, fa, spec.interval_len, stride_train, stride_eval, var_threshold
        )
        for fa in plan.folds
    ]
    baselines = [
        _fold_baseline(dataset, fa) if include_baseline else None for fa in plan.folds
    ]

    grid_rows: list[dict] = []
    per_combo: list[list[dict]] = []  # parallel: fold records w/ live objects
    for overrides in combos:
        records = []
        for fw in fold_windows:
            k = fw.assignment.fold
            det = build_detector(
                _spec_for_fold(
                    spec, overrides, k, fw.train.feature_dim, spec.interval_len
                )
            )
            det, history = train_detector(
                det, fw.train, _schedule_for_fold(schedule, k), val_windows=fw.val
            )
            test_report, test_dict = _evaluate_windows(det, fw.test, margin_k)
            records.append(
                {
                    "fold": k,
                    "detector": det,
                    "history": history,
                    "test_report": test_report,
                    "test_dict": test_dict,
                }
            )
        per_combo.append(records)
        reports = [r["test_report"] for r in records]
        grid_rows.append(
            {
                "overrides": dict(overrides),
                "metrics": _metric_summary(reports),
                "fold_accuracies": [r.accuracy for r in reports],
                "folds": [
                    {
                        "fold": rec["fold"],
                        "accuracy": rep.accuracy,
                        "precision": rep.precision,
                        "recall": rep.recall,
                        "f1": rep.f1,
                    }
                    for rec, rep in zip(records, reports)
                ],
            }
        )

    scores = [row["metrics"]["accuracy"]["mean"] for row in grid_rows]
    best = int(np.argmax(scores))
    selected_rows = per_combo[best]

    folds = []
    for fw, rec, base in zip(fold_windows, selected_rows, baselines):
        entry = {
            "fold": fw.assignment.fold,
            "participants": {k: list(v) for k, v in fw.assignment.roles().items()},
            "window_participants": fw.window_participants(),
            **fw.counts(),
            "pca": fw.pca,
            "test": rec["test_dict"],
            "history": rec["history"],
            "detector_fingerprint": detector_fingerprint(rec["detector"]),
        }
        if base is not None:
            entry["baseline"] = base
        folds.append(entry)

    summary = {
        "selected_overrides": grid_rows[best]["overrides"],
        "metrics": grid_rows[best]["metrics"],
    }
    if include_baseline:
        accs = [
            b["test"]["accuracy"] for b in baselines if b is not None and "test" in b
        ]
        if accs:
            summary["baseline_accuracy"] = _mean_sd(accs)

    return ExperimentReport(
        protocol="cross_participant",
        config={
            "dataset": _dataset_config(dataset),
            "spec": dataclasses.asdict(spec),
            "schedule": dataclasses.asdict(schedule),
            "grid": combos,
            "stride_train": stride_train,
            "stride_eval": stride_eval,
            "var_threshold": var_threshold,
            "margin_k": margin_k,
            "plan": plan.to_dict(),
        },
        folds=folds,
        summary=summary,
        grid=grid_rows,
        selected={"index": best, **grid_rows[best]},
        artifacts={"detectors": [r["detector"] for r in selected_rows]},
    )


# ---------------------------------------------------------------------------
# regime 2: last-layer transfer


def _majority_baseline(train_ws: WindowSet, test_ws: WindowSet) -> dict:
    counts = np.bincount(train_ws.y, minlength=2)
    majority = int(np.argmax(counts))
    accuracy = float(np.mean(test_ws.y == majority))
    return {"majority_class": majority, "accuracy": accuracy}


def run_transfer(
    src_dataset: ReactionDataset,
    dst_dataset: ReactionDataset,
    spec: DetectorSpec,
    schedule: DetectorSchedule = DetectorSchedule(),
    plan: FoldPlan | None = None,
    *,
    finetune_schedule: DetectorSchedule | None = None,
    parents: list[Detector] | None = None,
    stride_train: int = DEFAULT_STRIDE_TRAIN,
    stride_eval: int = DEFAULT_STRIDE_EVAL,
    margin_k: int = 0,
    n_folds: int = 5,
    seed: int = 0,
) -> ExperimentReport:
    """Per fold: train on the source dataset, fine-tune only the last layer
    on the target dataset, evaluate on target test participants.

    Records the parent fingerprint per fold and verifies the trunk of the
    transferred detector hashes identically to the parent's. ``parents``
    may supply pre-trained source detectors (one per fold) to skip source
    training.
    """
    shared = sorted(
        set(src_dataset.participants()) & set(dst_dataset.participants())
    )
    if plan is None:
        if not shared:
            raise InvalidArgumentError(
                "source and target datasets share no participants"
            )
        plan = make_participant_folds(shared, n_folds=n_folds, seed=seed)
    roster = set(plan.participants())
    for name, ds in (("source", src_dataset), ("target", dst_dataset)):
        missing = roster - set(ds.participants())
        if missing:
            raise InvalidArgumentError(
                f"{name} dataset lacks plan participants {sorted(missing)}"
            )
    if parents is not None and len(parents) != plan.n_folds:
        raise InvalidArgumentError(
            f"need one parent detector per fold ({plan.n_folds}), got {len(parents)}"
        )
    ft_schedule = finetune_schedule or schedule

    folds = []
    transferred_all: list[Detector] = []
    parents_out: list[Detector] = []
    test_reports: list[MetricReport] = []
    for fa in plan.folds:
        k = fa.fold
        dst_fw = build_fold_windows(
            dst_dataset, fa, spec.interval_len, stride_train, stride_eval
        )
        if parents is not None:
            parent = parents[k]
            parent_history: list[dict] = []
        else:
            src_fw = build_fold_windows(
                src_dataset, fa, spec.interval_len, stride_train, stride_eval
            )
            parent = build_detector(
                _spec_for_fold(
                    spec, {}, ("src", k), src_fw.train.feature_dim, spec.interval_len
                )
            )
            parent, parent_history = train_detector(
                parent, src_fw.train, _schedule_for_fold(schedule, ("src", k)),
                val_windows=src_fw.val,
            )
        if not parent.trained:
            raise InvalidArgumentError(f"parent detector for fold {k} is not trained")

        parent_fp = detector_fingerprint(parent)
        transferred, ft_history = finetune_last_layer(
            parent, dst_fw.train, _schedule_for_fold(ft_schedule, ("ft", k)),
            val_windows=dst_fw.val,
        )
        if spec.arch == "minirocket":
            frozen_identical = True  # kernel plan is immutable by construction
        else:
            frozen_identical = state_fingerprint(
                trunk_state(parent)
            ) == state_fingerprint(trunk_state(transferred))

        test_report, test_dict = _evaluate_windows(transferred, dst_fw.test, margin_k)
        test_reports.append(test_report)
        transferred_all.append(transferred)
        parents_out.append(parent)
        folds.append(
            {
                "fold": k,
                "participants": {kk: list(v) for kk, v in fa.roles().items()},
                "window_participants": dst_fw.window_participants(),
                **dst_fw.counts(),
                "parent_fingerprint": parent_fp,
                "parent_history_len": len(parent_history),
                "frozen_identical": frozen_identical,
                "finetune_history": ft_history,
                "test": test_dict,
                "majority_baseline": _majority_baseline(dst_fw.train, dst_fw.test),
                "detector_fingerprint": detector_fingerprint(transferred),
            }
        )

    summary = {
        "metrics": _metric_summary(test_reports),
        "majority_accuracy": _mean_sd(
            f["majority_baseline"]["accuracy"] for f in folds
        ),
        "all_trunks_frozen": all(f["frozen_identical"] for f in folds),
    }
    return ExperimentReport(
        protocol="transfer",
        config={
            "source": _dataset_config(src_dataset),
            "target": _dataset_config(dst_dataset),
            "spec": dataclasses.asdict(spec),
            "schedule": dataclasses.asdict(schedule),
            "finetune_schedule": dataclasses.asdict(ft_schedule),
            "stride_train": stride_train,
            "stride_eval": stride_eval,
            "margin_k": margin_k,
            "plan": plan.to_dict(),
        },
        folds=folds,
        summary=summary,
        extras={
            "direction": f"{src_dataset.name}->{dst_dataset.name}",
            "parent_fingerprints": [f["parent_fingerprint"] for f in folds],
        },
        artifacts={"detectors": transferred_all, "parents": parents_out},
    )


# ---------------------------------------------------------------------------
# regime 3: single-participant budget sweep


def run_single_participant_sweep(
    dataset: ReactionDataset,
    spec: DetectorSpec,
    schedule: DetectorSchedule = DetectorSchedule(),
    *,
    budgets=SWEEP_BUDGETS,
    participants=None,
    stride: int = DEFAULT_STRIDE_TRAIN,
    margin_k: int = 0,
    seed: int = 0,
    warm_start: Detector | None = None,
) -> ExperimentReport:
    """Per participant and budget b: train on b of their windows, validate
    on 20%, test on the remainder (window-level random assignment).

    Budgets whose train split misses a class are skipped and recorded.
    ``warm_start`` fine-tunes the last layer of an existing detector
    instead of training from scratch.
    """
    budgets = tuple(float(b) for b in budgets)
    for b in budgets:
        SweepPlan(participant_id="_", budget=b, seed=seed)  # validates range
    roster = list(participants) if participants is not None else dataset.participants()
    missing = set(roster) - set(dataset.participants())
    if missing:
        raise InvalidArgumentError(f"dataset lacks participants {sorted(missing)}")
    if warm_start is not None and not warm_start.trained:
        raise InvalidArgumentError("warm_start detector is not trained")

    rows: list[dict] = []
    skipped: list[dict] = []
    for pid in roster:
        ws = build_window_set(dataset.sequences, spec.interval_len, stride, [pid])
        n = ws.n_windows
        if n < 3:
            skipped.append(
                {"participant": pid, "budget": None, "reason": f"only {n} windows"}
            )
            continue
        order = rng_for(seed, "sweep", pid).permutation(n)
        n_val = max(1, _round_half_up(SWEEP_VAL_FRACTION * n))
        for b in budgets:
            n_train = max(1, _round_half_up(b * n))
            if n_train + n_val >= n:
                skipped.append(
                    {
                        "participant": pid,
                        "budget": b,
                        "reason": "no windows left for testing",
                    }
                )
                continue
            train_ws = ws.subset(order[:n_train])
            val_ws = ws.subset(order[n_train : n_train + n_val])
            test_ws = ws.subset(order[n_train + n_val :])
            if len(np.unique(train_ws.y)) < 2:
                skipped.append(
                    {
                        "participant": pid,
                        "budget": b,
                        "reason": "train split has a single class",
                    }
                )
                continue
            key = (pid, b)
            sched = _schedule_for_fold(schedule, key)
            if warm_start is not None:
                det, history = finetune_last_layer(
                    warm_start, train_ws, sched, val_windows=val_ws
                )
            else:
                det = build_detector(
                    _spec_for_fold(spec, {}, key, ws.feature_dim, spec.interval_len)
                )
                det, history = train_detector(
                    det, train_ws, sched, val_windows=val_ws
                )
            test_report, test_dict = _evaluate_windows(det, test_ws, margin_k)
            rows.append(
                {
                    "participant": pid,
                    "budget": b,
                    "n_windows": n,
                    "n_train_windows": train_ws.n_windows,
                    "n_val_windows": val_ws.n_windows,
                    "n_test_windows": test_ws.n_windows,
                    "train_class_counts": list(train_ws.class_counts()),
                    "test_class_counts": list(test_ws.class_counts()),
                    "test": test_dict,
                    "final_val_accuracy": history[-1].get("val_accuracy")
                    if history
                    else None,
                    "_test_report": test_report,
                }
            )

    by_budget = {}
    for b in budgets:
        reports = [r["_test_report"] for r in rows if r["budget"] == b]
        by_budget[f"{b:.2f}"] = {
            "n": len(reports),
            "metrics": _metric_summary(reports) if reports else None,
        }
    for r in rows:
        r.pop("_test_report")

    return ExperimentReport(
        protocol="single_participant_sweep",
        config={
            "dataset": _dataset_config(dataset),
            "spec": dataclasses.asdict(spec),
            "schedule": dataclasses.asdict(schedule),
            "budgets": list(budgets),
            "val_fraction": SWEEP_VAL_FRACTION,
            "stride": stride,
            "margin_k": margin_k,
            "seed": seed,
            "participants": list(roster),
            "warm_start": warm_start is not None,
        },
        folds=rows,
        summary={"by_budget": by_budget},
        skipped=skipped,
    )


# ---------------------------------------------------------------------------
# leakage scan


def scan_report_leakage(report: ExperimentReport | dict) -> dict:
    """Audit a fold-based report: no participant whose windows reached a
    fold's test split may also have windows in that fold's train or val.

    Returns ``{"checked_folds": n, "violations": [...]}``; an empty
    violation list means the report is clean. Sweep rows (single
    participant, window-level splits) have no cross-participant boundary
    and are not scanned.
    """
    data = report.to_dict() if isinstance(report, ExperimentReport) else report
    checked = 0
    violations = []
    for entry in data.get("folds", []):
        wp = entry.get("window_participants")
        if not wp:
            continue
        checked += 1
        test_p = set(wp.get("test", []))
        crossed = sorted(
            test_p & (set(wp.get("train", [])) | set(wp.get("val", [])))
        )
        if crossed:
            violations.append({"fold": entry.get("fold"), "participants": crossed})
        plan_roles = entry.get("participants")
        if plan_roles:
            for role in ("train", "val", "test"):
                extra = sorted(set(wp.get(role, [])) - set(plan_roles.get(role, [])))
                if extra:
                    violations.append(
                        {
                            "fold": entry.get("fold"),
                            "role": role,
                            "participants": extra,
                            "reason": "windows from participants outside the plan",
                        }
                    )
    return {"checked_folds": checked, "violations": violations}
