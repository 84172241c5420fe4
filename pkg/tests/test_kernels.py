"""Backend parity: the accelerated kernels must match the plain-numpy path."""

import os
import subprocess
import sys

import numpy as np
import pytest

from necksense import kernels


def _numba_ready():
    try:
        import importlib

        importlib.import_module("necksense.kernels._numba")
        return True
    except ImportError:
        return False


@pytest.fixture()
def both_backends():
    if not _numba_ready():
        pytest.skip("numba backend not importable here")
    yield
    kernels.set_backend(None)


def _run(fn, *args):
    kernels.set_backend("numpy")
    ref = fn(*args)
    kernels.set_backend("numba")
    fast = fn(*args)
    kernels.set_backend(None)
    return ref, fast


def test_active_backend_reports():
    assert kernels.active_backend() in ("numpy", "numba")


def test_env_override_selects_numpy():
    code = (
        "from necksense import kernels; print(kernels.active_backend())"
    )
    env = dict(os.environ, NECKSENSE_BACKEND="numpy")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.returncode == 0
    assert out.stdout.strip() == "numpy"


def test_set_backend_rejects_unknown():
    with pytest.raises(Exception):
        kernels.set_backend("fortran")
    kernels.set_backend(None)


def test_render_blobs_parity(both_backends, rng):
    centers = rng.uniform(0, 60, size=(5, 2))
    sigmas = rng.uniform(2, 8, size=5)
    amps = rng.uniform(0.2, 0.9, size=5)
    ref, fast = _run(kernels.render_blobs, 48, 64, centers, sigmas, amps, 0.08)
    assert ref.shape == (48, 64)
    assert np.max(np.abs(ref - fast)) < 1e-6


def test_bilinear_resize_parity(both_backends, rng):
    img = rng.uniform(0, 1, size=(37, 53))
    ref, fast = _run(kernels.bilinear_resize, img, 24, 32)
    assert ref.shape == (24, 32)
    assert np.max(np.abs(ref - fast)) < 1e-6


def test_bilinear_resize_identity(rng):
    img = rng.uniform(0, 1, size=(20, 30))
    out = kernels.bilinear_resize(img, 20, 30)
    assert np.allclose(out, img, atol=1e-7)


def test_affine_warp_parity(both_backends, rng):
    img = rng.uniform(0, 1, size=(40, 40))
    theta = np.deg2rad(12.0)
    c, s = np.cos(theta), np.sin(theta)
    cx = cy = 19.5
    matrix = np.array(
        [[c, -s, cx - c * cx + s * cy], [s, c, cy - s * cx - c * cy]]
    )
    ref, fast = _run(kernels.affine_warp, img, matrix, 40, 40, 0.0)
    assert np.max(np.abs(ref - fast)) < 1e-6


def test_affine_warp_identity_and_fill(rng):
    img = rng.uniform(0, 1, size=(16, 16))
    eye = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    out = kernels.affine_warp(img, eye, 16, 16, 0.0)
    assert np.allclose(out, img, atol=1e-7)
    shift = np.array([[1.0, 0.0, -100.0], [0.0, 1.0, 0.0]])
    out = kernels.affine_warp(img, shift, 16, 16, 0.5)
    assert np.allclose(out, 0.5)


def test_minirocket_bitwise_identical_across_backends(both_backends, rng):
    from necksense.detectors.minirocket import fit_minirocket_params, minirocket_transform

    x = rng.normal(size=(12, 7, 40)).astype(np.float32)
    kernels.set_backend("numpy")
    params_np = fit_minirocket_params(x, num_features=504, seed=3)
    feats_np = minirocket_transform(x, params_np)
    kernels.set_backend("numba")
    params_nb = fit_minirocket_params(x, num_features=504, seed=3)
    feats_nb = minirocket_transform(x, params_nb)
    kernels.set_backend(None)
    assert np.array_equal(feats_np, feats_nb)
