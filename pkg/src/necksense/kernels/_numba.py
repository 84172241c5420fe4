"""Compiled kernel backend: the shared source functions under @njit.

Importing this module raises ImportError when numba is unavailable; the
dispatcher falls back to the numpy backend in that case.
"""

from __future__ import annotations

from numba import njit

from ._image_impl import affine_warp_impl, bilinear_resize_impl, render_blobs_impl
from ._minirocket_impl import fit_biases_impl, transform_impl

__all__ = [
    "render_blobs",
    "bilinear_resize",
    "affine_warp",
    "mr_fit_biases",
    "mr_transform",
]

# no parallel=True: target boxes are often single-core and the inner loops
# are already contiguous; no fastmath: backend parity requires IEEE order
render_blobs = njit(cache=True)(render_blobs_impl)
bilinear_resize = njit(cache=True)(bilinear_resize_impl)
affine_warp = njit(cache=True)(affine_warp_impl)
mr_fit_biases = njit(cache=True)(fit_biases_impl)
mr_transform = njit(cache=True)(transform_impl)
