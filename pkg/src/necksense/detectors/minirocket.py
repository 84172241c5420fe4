"""Random-convolution detector: fixed kernel features + ridge classifier.

Feature parameters (dilations, per-feature bias quantiles, channel
combinations) are drawn once from the training windows; the classifier
is a cross-validated ridge on the standardized features. Training is a
single deterministic fit, so its history has exactly one entry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.linear_model import RidgeClassifierCV
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler

from .. import kernels
from ..errors import InvalidArgumentError
from ..seeding import rng_for

MIN_INPUT_LENGTH = 9


@dataclass(frozen=True, eq=False)
class MinirocketParams:
    dilations: np.ndarray
    num_features_per_dilation: np.ndarray
    num_channels_per_combination: np.ndarray
    channel_indices: np.ndarray
    biases: np.ndarray

    @property
    def num_features(self) -> int:
        return kernels.NUM_KERNELS * int(self.num_features_per_dilation.sum())


def _quantiles(n: int) -> np.ndarray:
    # low-discrepancy golden-ratio sequence; deterministic, well spread
    return ((np.arange(1, n + 1) * ((5**0.5 + 1) / 2)) % 1.0).astype(np.float64)


def _dilation_plan(
    input_length: int, num_features: int, max_dilations_per_kernel: int
) -> tuple[np.ndarray, np.ndarray]:
    num_per_kernel = num_features // kernels.NUM_KERNELS
    true_max = min(num_per_kernel, max_dilations_per_kernel)
    multiplier = num_per_kernel / true_max
    max_exponent = np.log2((input_length - 1) / (kernels.KERNEL_LENGTH - 1))
    dilations, counts = np.unique(
        np.logspace(0, max_exponent, true_max, base=2).astype(np.int32),
        return_counts=True,
    )
    num_features_per_dilation = (counts * multiplier).astype(np.int32)
    remainder = num_per_kernel - int(num_features_per_dilation.sum())
    i = 0
    while remainder > 0:
        num_features_per_dilation[i] += 1
        remainder -= 1
        i = (i + 1) % len(num_features_per_dilation)
    return dilations.astype(np.int32), num_features_per_dilation


def fit_minirocket_params(
    X: np.ndarray,
    num_features: int = 9996,
    max_dilations_per_kernel: int = 32,
    seed: int = 0,
) -> MinirocketParams:
    """Draw feature parameters from training windows (N, C, L)."""
    X = np.ascontiguousarray(np.asarray(X, dtype=np.float32))
    if X.ndim != 3:
        raise InvalidArgumentError(f"expected (N, C, L) windows, got {X.shape}")
    n, num_channels, input_length = X.shape
    if n < 1:
        raise InvalidArgumentError("cannot fit feature parameters on zero windows")
    if input_length < MIN_INPUT_LENGTH:
        raise InvalidArgumentError(
            f"windows of length {input_length} are too short; need >= {MIN_INPUT_LENGTH}"
        )
    if num_features < kernels.NUM_KERNELS:
        raise InvalidArgumentError(
            f"num_features must be >= {kernels.NUM_KERNELS}"
        )

    dilations, num_features_per_dilation = _dilation_plan(
        input_length, num_features, max_dilations_per_kernel
    )
    num_combinations = kernels.NUM_KERNELS * len(dilations)

    rng = rng_for(seed, "minirocket-params")
    max_exp_ch = np.log2(min(num_channels, 9) + 1)
    num_channels_per_combination = (
        2 ** rng.uniform(0, max_exp_ch, size=num_combinations)
    ).astype(np.int32)
    channel_indices = np.zeros(int(num_channels_per_combination.sum()), dtype=np.int32)
    start = 0
    for c in num_channels_per_combination:
        channel_indices[start : start + c] = rng.choice(
            num_channels, int(c), replace=False
        )
        start += int(c)

    total_features = kernels.NUM_KERNELS * int(num_features_per_dilation.sum())
    quantiles = _quantiles(total_features)
    example_picks = rng.integers(0, n, size=num_combinations).astype(np.int64)

    biases = kernels.mr_fit_biases(
        X,
        kernels.kernel_indices(),
        num_channels_per_combination,
        channel_indices,
        dilations,
        num_features_per_dilation,
        quantiles,
        example_picks,
    )
    return MinirocketParams(
        dilations=dilations,
        num_features_per_dilation=num_features_per_dilation,
        num_channels_per_combination=num_channels_per_combination,
        channel_indices=channel_indices,
        biases=biases,
    )


def minirocket_transform(X: np.ndarray, params: MinirocketParams) -> np.ndarray:
    X = np.ascontiguousarray(np.asarray(X, dtype=np.float32))
    if X.ndim != 3:
        raise InvalidArgumentError(f"expected (N, C, L) windows, got {X.shape}")
    return kernels.mr_transform(
        X,
        kernels.kernel_indices(),
        params.num_channels_per_combination,
        params.channel_indices,
        params.dilations,
        params.num_features_per_dilation,
        params.biases,
    )


def make_ridge():
    return make_pipeline(
        StandardScaler(with_mean=False),
        RidgeClassifierCV(alphas=np.logspace(-3, 3, 10)),
    )


def ridge_probabilities(pipeline, features: np.ndarray) -> np.ndarray:
    """Map ridge decision values to rows that sum to exactly 1."""
    scores = pipeline.decision_function(features)
    p1 = 1.0 / (1.0 + np.exp(-np.asarray(scores, dtype=np.float64)))
    return np.stack([1.0 - p1, p1], axis=1)
