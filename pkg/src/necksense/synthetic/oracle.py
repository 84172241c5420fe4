"""Brute-force single-channel threshold baseline.

Exhaustively searches (channel, threshold) pairs over a quantile grid for
the rule "label 1 iff channel value > threshold", scored by training
accuracy on frames. Any learned detector on synthetic data should beat
this floor; shuffled labels should drive it to chance. The search is
order-free: ties resolve to the lowest (channel index, threshold).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DataError, InvalidArgumentError
from ..metrics import MetricReport, macro_metrics
from ..reaction import ReactionSequence


class DegenerateLabelsError(DataError):
    """Training labels contain a single class."""


@dataclass
class ThresholdOracleResult:
    channel: int
    threshold: float
    train_metrics: MetricReport
    test_metrics: MetricReport | None

    def to_dict(self) -> dict:
        out = {
            "channel": self.channel,
            "threshold": self.threshold,
            "train": self.train_metrics.to_dict(),
        }
        if self.test_metrics is not None:
            out["test"] = self.test_metrics.to_dict()
        return out


def _stack(sequences: list[ReactionSequence]) -> tuple[np.ndarray, np.ndarray]:
    if not sequences:
        raise InvalidArgumentError("no sequences given")
    x = np.concatenate([s.features for s in sequences], axis=0)
    y = np.concatenate([s.labels for s in sequences], axis=0).astype(np.int64)
    return x, y


def oracle_threshold_detector(
    train_sequences: list[ReactionSequence],
    test_sequences: list[ReactionSequence] | None = None,
    n_thresholds: int = 64,
) -> ThresholdOracleResult:
    x, y = _stack(train_sequences)
    classes = np.unique(y)
    if len(classes) < 2:
        raise DegenerateLabelsError(
            f"threshold oracle needs both classes, got only {classes.tolist()}"
        )

    n_features = x.shape[1]
    best = (-1.0, 0, 0.0)  # (accuracy, channel, threshold); ties keep first
    qs = np.linspace(0.0, 1.0, n_thresholds + 2)[1:-1]
    for c in range(n_features):
        col = x[:, c].astype(np.float64)
        cand = np.unique(np.quantile(col, qs))
        pred = col[None, :] > cand[:, None]  # (n_cand, T)
        acc = np.mean(pred == (y[None, :] == 1), axis=1)
        k = int(np.argmax(acc))  # first max -> lowest threshold wins ties
        if acc[k] > best[0] + 1e-12:
            best = (float(acc[k]), c, float(cand[k]))

    _, channel, threshold = best
    train_pred = (x[:, channel] > threshold).astype(np.int64)
    train_metrics = macro_metrics(train_pred, y)
    test_metrics = None
    if test_sequences is not None:
        xt, yt = _stack(test_sequences)
        if xt.shape[1] != n_features:
            raise InvalidArgumentError("train/test feature dimensions differ")
        test_pred = (xt[:, channel] > threshold).astype(np.int64)
        test_metrics = macro_metrics(test_pred, yt)
    return ThresholdOracleResult(
        channel=channel,
        threshold=threshold,
        train_metrics=train_metrics,
        test_metrics=test_metrics,
    )
