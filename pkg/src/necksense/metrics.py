"""Evaluation mathematics.

Face tracking error: MAE_f averages absolute error over the 52 expression
coefficients, MAE_o over the 3 head angles, both per frame then over
frames. Classification: macro precision/recall/F1 (unweighted over the two
classes, zero-denominator cases defined as 0) plus a margin-tolerant
variant that forgives predictions matching the truth within +/-k frames.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError
from .registry import N_ANGLES, N_BLENDSHAPES, STATE_DIM


@dataclass
class MetricReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    per_class: dict = field(default_factory=dict)
    margin: dict = field(default_factory=dict)  # k -> {accuracy, precision, ...}

    def to_dict(self) -> dict:
        out = {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "per_class": self.per_class,
        }
        if self.margin:
            out["margin"] = {str(k): v for k, v in self.margin.items()}
        return out


def mae_face(pred: np.ndarray, truth: np.ndarray) -> tuple[float, float]:
    """(MAE_f, MAE_o) between two aligned (N, 55) state sequences."""
    p = np.asarray(pred, dtype=np.float64)
    t = np.asarray(truth, dtype=np.float64)
    if p.shape != t.shape:
        raise InvalidArgumentError(f"shape mismatch: {p.shape} vs {t.shape}")
    if p.ndim == 1:
        p = p[None, :]
        t = t[None, :]
    if p.shape[1] != STATE_DIM:
        raise InvalidArgumentError(f"expected {STATE_DIM} state values, got {p.shape[1]}")
    if len(p) == 0:
        raise InvalidArgumentError("empty sequences")
    diff = np.abs(p - t)
    mae_f = float(np.mean(np.mean(diff[:, :N_BLENDSHAPES], axis=1)))
    mae_o = float(np.mean(np.mean(diff[:, N_BLENDSHAPES:], axis=1)))
    return mae_f, mae_o


def _check_labels(pred, true) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(pred).astype(np.int64)
    t = np.asarray(true).astype(np.int64)
    if p.shape != t.shape or p.ndim != 1:
        raise InvalidArgumentError(f"label shape mismatch: {p.shape} vs {t.shape}")
    if len(p) == 0:
        raise InvalidArgumentError("empty label sequences")
    if not (np.all(np.isin(p, (0, 1))) and np.all(np.isin(t, (0, 1)))):
        raise InvalidArgumentError("labels must be in {0,1}")
    return p, t


def macro_metrics(pred_labels, true_labels) -> MetricReport:
    """Accuracy plus macro-averaged precision/recall/F1 over both classes."""
    pred, true = _check_labels(pred_labels, true_labels)
    accuracy = float(np.mean(pred == true))
    per_class = {}
    precisions, recalls, f1s = [], [], []
    for cls in (0, 1):
        tp = int(np.sum((pred == cls) & (true == cls)))
        fp = int(np.sum((pred == cls) & (true != cls)))
        fn = int(np.sum((pred != cls) & (true == cls)))
        prec = tp / (tp + fp) if (tp + fp) > 0 else 0.0
        rec = tp / (tp + fn) if (tp + fn) > 0 else 0.0
        f1 = 2 * prec * rec / (prec + rec) if (prec + rec) > 0 else 0.0
        per_class[cls] = {"tp": tp, "fp": fp, "fn": fn,
                          "precision": prec, "recall": rec, "f1": f1}
        precisions.append(prec)
        recalls.append(rec)
        f1s.append(f1)
    return MetricReport(
        accuracy=accuracy,
        precision=float(np.mean(precisions)),
        recall=float(np.mean(recalls)),
        f1=float(np.mean(f1s)),
        per_class=per_class,
    )


def margin_corrected_labels(pred_labels, true_labels, k: int) -> np.ndarray:
    """Truth adjusted so predictions matching it within +/-k frames count.

    Wherever pred[i] equals true[j] for some j in [i-k, i+k] (clipped to
    the sequence bounds), the corrected truth at i becomes pred[i];
    otherwise it stays true[i]. k=0 returns the truth unchanged.
    """
    pred, true = _check_labels(pred_labels, true_labels)
    if k < 0:
        raise InvalidArgumentError("margin k must be >= 0")
    n = len(pred)
    corrected = true.copy()
    for i in range(n):
        lo = max(0, i - k)
        hi = min(n, i + k + 1)
        if np.any(true[lo:hi] == pred[i]):
            corrected[i] = pred[i]
    return corrected


def margin_metrics(pred_labels, true_labels, k: int) -> MetricReport:
    """Macro metrics against the margin-corrected truth; k=0 is the plain form."""
    corrected = margin_corrected_labels(pred_labels, true_labels, k)
    return macro_metrics(pred_labels, corrected)


def margin_metrics_grouped(pred_labels, true_labels, groups, k: int) -> MetricReport:
    """Margin metrics where the tolerance never crosses a group boundary.

    `groups` is a per-frame id (participant, stimulus) so corrections stay
    within one recording; the corrected labels then feed one global macro
    computation.
    """
    pred, true = _check_labels(pred_labels, true_labels)
    groups = np.asarray(groups)
    if len(groups) != len(pred):
        raise InvalidArgumentError("groups length mismatch")
    corrected = np.empty_like(true)
    start = 0
    n = len(pred)
    while start < n:
        stop = start
        while stop < n and groups[stop] == groups[start]:
            stop += 1
        corrected[start:stop] = margin_corrected_labels(
            pred[start:stop], true[start:stop], k
        )
        start = stop
    return macro_metrics(pred, corrected)
