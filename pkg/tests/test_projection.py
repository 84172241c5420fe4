"""Variance-threshold projection vs. an independent eigen decomposition."""

import numpy as np
import pytest

from necksense.errors import InvalidArgumentError
from necksense.projection import STD_EPS, Projector, apply_projector, fit_projector


def random_covariance(rng, d):
    a = rng.normal(size=(d, d))
    return a @ a.T + 1e-9 * np.eye(d)


def independent_m(data, threshold):
    # replicate the published contract from scratch: z-score (constant
    # features pinned), covariance ddof=1, eigen spectrum, smallest count
    # whose cumulative ratio reaches the threshold
    x = np.asarray(data, dtype=np.float64)
    std = x.std(axis=0, ddof=0)
    std = np.where(std < STD_EPS, 1.0, std)
    z = (x - x.mean(axis=0)) / std
    vals = np.linalg.eigvalsh(np.atleast_2d(np.cov(z, rowvar=False, ddof=1)))[::-1]
    vals = np.clip(vals, 0.0, None)
    total = vals.sum()
    if total <= 0:
        return 1
    cum = np.cumsum(vals) / total
    return int(np.searchsorted(cum, threshold - 1e-12) + 1)


def test_component_count_matches_spectrum(rng):
    for _ in range(60):
        d = int(rng.integers(2, 12))
        n = int(rng.integers(d + 2, 200))
        cov = random_covariance(rng, d)
        data = rng.multivariate_normal(np.zeros(d), cov, size=n)
        thr = float(rng.uniform(0.5, 0.999))
        proj = fit_projector(data, var_threshold=thr)
        assert proj.n_components == independent_m(data, thr)
        assert proj.explained >= thr - 1e-12


def test_one_dominant_direction_keeps_one():
    rng = np.random.default_rng(7)
    cov = np.diag([100.0, 1e-6, 1e-6])
    data = rng.multivariate_normal(np.zeros(3), cov, size=400)
    proj = fit_projector(data, var_threshold=0.95)
    assert proj.n_components == 1


def test_apply_shapes():
    rng = np.random.default_rng(11)
    data = rng.normal(size=(50, 6))
    proj = fit_projector(data, var_threshold=0.9)
    m = proj.n_components
    flat = apply_projector(proj, data)
    assert flat.shape == (50, m)
    stack = rng.normal(size=(4, 6, 9))
    out = apply_projector(proj, stack)
    assert out.shape == (4, m, 9)


def test_apply_centers_before_projecting():
    rng = np.random.default_rng(13)
    data = rng.normal(size=(80, 5)) + 40.0
    proj = fit_projector(data, var_threshold=0.99)
    out = apply_projector(proj, data)
    assert abs(float(out.mean())) < 1.0


def test_window_apply_matches_frame_apply():
    rng = np.random.default_rng(17)
    data = rng.normal(size=(30, 4))
    proj = fit_projector(data, var_threshold=0.9)
    windows = rng.normal(size=(3, 4, 8))
    out3 = apply_projector(proj, windows)
    for n in range(3):
        per_frame = apply_projector(proj, windows[n].T)  # (8, 4) frames
        assert np.allclose(out3[n], per_frame.T, atol=1e-6)


def test_validates_input():
    with pytest.raises(InvalidArgumentError):
        fit_projector(np.zeros((1, 3)), var_threshold=0.9)
    with pytest.raises(InvalidArgumentError):
        fit_projector(np.zeros((10, 3)), var_threshold=1.5)
    proj = fit_projector(np.random.default_rng(0).normal(size=(10, 3)))
    with pytest.raises(InvalidArgumentError):
        apply_projector(proj, np.zeros((5, 7)))


def test_constant_features_collapse():
    data = np.ones((20, 3))
    data[:, 0] = np.arange(20)
    proj = fit_projector(data, var_threshold=0.95)
    assert proj.n_components == 1
