"""Timing comparison of the compiled and pure-numpy kernel backends.

Run:  python3 benchmarks/bench_kernels.py [--repeats N]

Covers the hot paths: Gaussian-blob rendering, bilinear resize, affine
warping, and the random-convolution feature transform. Backend selection
mirrors production: the NECKSENSE_BACKEND environment variable ("numba"
or "numpy") decides which implementation the package dispatches to, so
each benchmark runs in a subprocess with that flag set.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

WORK = r"""
import json
import os
import time

import numpy as np

from necksense.kernels import (
    active_backend,
    affine_warp,
    bilinear_resize,
    render_blobs,
)
from necksense.detectors.minirocket import fit_minirocket_params, minirocket_transform

repeats = int(os.environ["BENCH_REPEATS"])
rng = np.random.default_rng(0)
timings = {"backend": active_backend()}


def bench(name, fn, *args):
    fn(*args)  # warm-up: triggers compilation on the compiled backend
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    timings[name] = best


centers = rng.uniform(0, 480, size=(12, 2))
centers[:, 1] *= 640.0 / 480.0
sigmas = rng.uniform(8, 40, size=12)
amps = rng.uniform(0.2, 1.0, size=12)
bench("render_blobs_480x640_12", render_blobs, 480, 640, centers, sigmas, amps, 0.05)

img = rng.random((480, 640))
bench("bilinear_resize_to_240x320", bilinear_resize, img, 240, 320)

matrix = np.array([[0.98, 0.05, 3.0], [-0.05, 0.98, -2.0]])
bench("affine_warp_480x640", affine_warp, img, matrix, 480, 640, 0.0)

X = rng.standard_normal((64, 55, 80)).astype(np.float32)
params = fit_minirocket_params(X, num_features=2520, seed=0)
bench("minirocket_transform_64x55x80", minirocket_transform, X, params)

print(json.dumps(timings))
"""


def run_backend(backend: str, repeats: int) -> dict:
    env = dict(os.environ)
    env["NECKSENSE_BACKEND"] = backend
    env["BENCH_REPEATS"] = str(repeats)
    out = subprocess.run(
        [sys.executable, "-c", WORK],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> int:
    parser = argparse.ArgumentParser(
        description="time the numba and numpy kernel backends"
    )
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    t0 = time.time()
    results = {b: run_backend(b, args.repeats) for b in ("numpy", "numba")}
    names = [k for k in results["numpy"] if k != "backend"]

    width = max(len(n) for n in names)
    print(f"{'kernel':<{width}}  {'numpy (ms)':>12}  {'numba (ms)':>12}  {'speedup':>8}")
    for name in names:
        t_np = results["numpy"][name] * 1e3
        t_nb = results["numba"][name] * 1e3
        ratio = t_np / t_nb if t_nb > 0 else float("inf")
        print(f"{name:<{width}}  {t_np:12.3f}  {t_nb:12.3f}  {ratio:7.1f}x")
    print(
        f"\nbackends verified: numpy={results['numpy']['backend']} "
        f"numba={results['numba']['backend']}; best-of-{args.repeats} wall "
        f"times, warm-up excluded; total {time.time() - t0:.1f}s"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
