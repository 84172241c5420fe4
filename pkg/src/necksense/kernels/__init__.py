"""Hot numeric kernels with two interchangeable backends.

`NECKSENSE_BACKEND=numba` (default when numba imports) runs compiled
kernels; `NECKSENSE_BACKEND=numpy` forces the pure-numpy path. The
feature-transform kernels are bit-identical across backends; image kernels
agree to 1e-6. `benchmarks/bench_kernels.py` times both.
"""

from __future__ import annotations

import os
from typing import Callable

from ..errors import ConfigError
from ._minirocket_impl import KERNEL_LENGTH, NUM_KERNELS, kernel_indices

ENV_VAR = "NECKSENSE_BACKEND"
_BACKENDS = ("numba", "numpy")

_active: dict[str, object] = {"name": None, "module": None}


def _load(name: str):
    if name == "numba":
        from . import _numba as mod
    else:
        from . import _numpy as mod
    return mod


def _resolve():
    if _active["module"] is not None:
        return _active["module"]
    requested = os.environ.get(ENV_VAR, "").strip().lower()
    if requested and requested not in _BACKENDS:
        raise ConfigError(
            f"{ENV_VAR}={requested!r}: expected one of {_BACKENDS}"
        )
    if requested:
        mod = _load(requested)
        name = requested
    else:
        try:
            mod = _load("numba")
            name = "numba"
        except ImportError:
            mod = _load("numpy")
            name = "numpy"
    _active["name"] = name
    _active["module"] = mod
    return mod


def active_backend() -> str:
    """Name of the backend that kernel calls will dispatch to."""
    _resolve()
    return str(_active["name"])


def set_backend(name: str | None) -> None:
    """Force a backend (tests, benchmarks); None re-reads the environment."""
    if name is None:
        _active["name"] = None
        _active["module"] = None
        return
    if name not in _BACKENDS:
        raise ConfigError(f"unknown kernel backend {name!r}")
    _active["module"] = _load(name)
    _active["name"] = name


def _dispatch(fn_name: str) -> Callable:
    def call(*args, **kwargs):
        return getattr(_resolve(), fn_name)(*args, **kwargs)

    call.__name__ = fn_name
    return call


render_blobs = _dispatch("render_blobs")
bilinear_resize = _dispatch("bilinear_resize")
affine_warp = _dispatch("affine_warp")
mr_fit_biases = _dispatch("mr_fit_biases")
mr_transform = _dispatch("mr_transform")

__all__ = [
    "ENV_VAR",
    "KERNEL_LENGTH",
    "NUM_KERNELS",
    "active_backend",
    "set_backend",
    "kernel_indices",
    "render_blobs",
    "bilinear_resize",
    "affine_warp",
    "mr_fit_biases",
    "mr_transform",
]
