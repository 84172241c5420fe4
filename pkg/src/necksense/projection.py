"""Variance-thresholded PCA over per-frame feature vectors.

Fit on training frames only: z-score each feature (epsilon-guarded std),
eigendecompose the covariance, keep the smallest component count whose
cumulative explained variance reaches the threshold. Application uses the
train-fitted statistics unchanged, on single frames or on windowed
(N, F, IL) stacks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

# features with std below this are treated as constant (std forced to 1, so
# they stay microscopic after scaling instead of being inflated to unit
# variance); feature scales in this toolkit are O(100), so 1e-2 is noise
STD_EPS = 1e-2


@dataclass(frozen=True)
class Projector:
    mean: np.ndarray  # (F,)
    std: np.ndarray  # (F,)
    components: np.ndarray  # (m, F) rows = principal axes
    eigenvalues: np.ndarray  # (F,) descending
    explained: float  # cumulative ratio actually retained
    var_threshold: float

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    @property
    def input_dim(self) -> int:
        return self.components.shape[1]


def fit_projector(train_matrix: np.ndarray, var_threshold: float = 0.95) -> Projector:
    x = np.asarray(train_matrix, dtype=np.float64)
    if x.ndim != 2 or len(x) < 2:
        raise InvalidArgumentError("projector needs a 2-D matrix with >= 2 rows")
    if not (0.0 < var_threshold <= 1.0):
        raise InvalidArgumentError("var_threshold must be in (0, 1]")
    mean = x.mean(axis=0)
    std = x.std(axis=0, ddof=0)
    std = np.where(std < STD_EPS, 1.0, std)  # constant features become all-zero
    z = (x - mean) / std
    cov = np.cov(z, rowvar=False, ddof=1)
    cov = np.atleast_2d(cov)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.clip(eigvals[order], 0.0, None)
    eigvecs = eigvecs[:, order]
    total = float(np.sum(eigvals))
    if total <= 0.0:
        m = 1  # all-constant input: keep one (degenerate) axis
        explained = 1.0
    else:
        ratios = np.cumsum(eigvals) / total
        # tiny epsilon so exact-threshold spectra are not missed to rounding
        m = int(np.searchsorted(ratios, var_threshold - 1e-12) + 1)
        m = min(m, len(eigvals))
        explained = float(ratios[m - 1])
    return Projector(
        mean=mean,
        std=std,
        components=np.ascontiguousarray(eigvecs[:, :m].T),
        eigenvalues=eigvals,
        explained=explained,
        var_threshold=var_threshold,
    )


def apply_projector(projector: Projector, data: np.ndarray) -> np.ndarray:
    """Project frames (N, F) or windows (N, F, IL) into component space."""
    arr = np.asarray(data, dtype=np.float64)
    f = projector.input_dim
    if arr.ndim == 2:
        if arr.shape[1] != f:
            raise InvalidArgumentError(f"expected {f} features, got {arr.shape[1]}")
        z = (arr - projector.mean) / projector.std
        return (z @ projector.components.T).astype(np.float32)
    if arr.ndim == 3:
        if arr.shape[1] != f:
            raise InvalidArgumentError(f"expected {f} channels, got {arr.shape[1]}")
        z = (arr - projector.mean[None, :, None]) / projector.std[None, :, None]
        return np.einsum("mf,nfl->nml", projector.components, z).astype(np.float32)
    raise InvalidArgumentError(f"expected 2-D or 3-D input, got shape {arr.shape}")
