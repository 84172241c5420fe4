"""Temporal cross-validation for the reconstruction model.

Each participant's frames are cut into contiguous temporal fifths; fold
k tests on everyone's k-th fifth and trains on the rest, so every fold
sees every participant and no frame appears in two test sets.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvalidArgumentError
from .data import FacemapDataset
from .model import FacemapConfig, build_facemap
from .train import FacemapSchedule, evaluate_facemap, train_facemap


def temporal_5fold(
    dataset: FacemapDataset, n_folds: int = 5
) -> list[tuple[np.ndarray, np.ndarray]]:
    """[(train_indices, test_indices)] per fold, indices into the dataset."""
    if n_folds < 2:
        raise InvalidArgumentError("need at least 2 folds")
    if len(dataset) == 0:
        raise InvalidArgumentError("cannot fold an empty dataset")

    chunks_by_fold: list[list[np.ndarray]] = [[] for _ in range(n_folds)]
    for pid in dataset.participant_ids():
        idx = np.flatnonzero(dataset.participants == pid)
        # dataset order is temporal within a participant; make it explicit
        idx = idx[np.argsort(dataset.timestamps[idx], kind="stable")]
        n = len(idx)
        if n < n_folds:
            raise InvalidArgumentError(
                f"participant {pid} has {n} frames; temporal {n_folds}-fold "
                f"needs at least {n_folds}"
            )
        base, extra = divmod(n, n_folds)
        start = 0
        for k in range(n_folds):
            size = base + (1 if k < extra else 0)
            chunks_by_fold[k].append(idx[start : start + size])
            start += size

    folds = []
    all_idx = np.arange(len(dataset))
    for k in range(n_folds):
        test = np.concatenate(chunks_by_fold[k])
        mask = np.ones(len(dataset), dtype=bool)
        mask[test] = False
        folds.append((all_idx[mask], np.sort(test)))
    return folds


def run_temporal_cv(
    config: FacemapConfig,
    dataset: FacemapDataset,
    schedule: FacemapSchedule,
    augment_policy=None,
    n_folds: int = 5,
) -> dict:
    """n_folds train/test runs plus a final retrain on all frames."""
    folds = temporal_5fold(dataset, n_folds=n_folds)
    fold_rows = []
    for k, (train_idx, test_idx) in enumerate(folds):
        model = build_facemap(config)
        model, history = train_facemap(
            model, dataset.subset(train_idx), schedule, augment_policy
        )
        test_mae_f, test_mae_o = evaluate_facemap(
            model, dataset.subset(test_idx), batch_size=schedule.batch_size
        )
        fold_rows.append(
            {
                "fold": k,
                "n_train": int(len(train_idx)),
                "n_test": int(len(test_idx)),
                "test_mae_f": float(test_mae_f),
                "test_mae_o": float(test_mae_o),
                "history": history,
            }
        )
    final_model = build_facemap(config)
    final_model, final_history = train_facemap(
        final_model, dataset, schedule, augment_policy
    )
    return {
        "folds": fold_rows,
        "mean_test_mae_f": float(np.mean([r["test_mae_f"] for r in fold_rows])),
        "mean_test_mae_o": float(np.mean([r["test_mae_o"] for r in fold_rows])),
        "final_model": final_model,
        "final_history": final_history,
    }
