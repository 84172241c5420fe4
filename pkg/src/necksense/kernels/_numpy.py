"""Pure-numpy kernel backend.

Image kernels are vectorized re-statements of the loop forms in
`_image_impl` (same sampling math). The feature-transform functions run
the shared source uncompiled; slower, but bit-identical to the compiled
backend.
"""

from __future__ import annotations

import numpy as np

from ._minirocket_impl import fit_biases_impl as mr_fit_biases
from ._minirocket_impl import transform_impl as mr_transform

__all__ = [
    "render_blobs",
    "bilinear_resize",
    "affine_warp",
    "mr_fit_biases",
    "mr_transform",
]


def render_blobs(height, width, centers, sigmas, amps, background):
    img = np.full((height, width), float(background), dtype=np.float64)
    ys = np.arange(height, dtype=np.float64)
    xs = np.arange(width, dtype=np.float64)
    for k in range(centers.shape[0]):
        ty = (ys - centers[k, 0]) / sigmas[k]
        tx = (xs - centers[k, 1]) / sigmas[k]
        vy = np.exp(-0.5 * ty * ty)
        vx = np.exp(-0.5 * tx * tx)
        img += amps[k] * (vy[:, None] * vx[None, :])
    return img


def _sample_bilinear(img, sy, sx):
    in_h, in_w = img.shape
    y0 = np.floor(sy).astype(np.int64)
    x0 = np.floor(sx).astype(np.int64)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    fy = sy - y0
    fx = sx - x0
    return (
        ((1.0 - fy) * (1.0 - fx)) * img[y0, x0]
        + ((1.0 - fy) * fx) * img[y0, x1]
        + (fy * (1.0 - fx)) * img[y1, x0]
        + (fy * fx) * img[y1, x1]
    )


def bilinear_resize(img, out_h, out_w):
    in_h, in_w = img.shape
    sy = (np.arange(out_h, dtype=np.float64) + 0.5) * (in_h / out_h) - 0.5
    sx = (np.arange(out_w, dtype=np.float64) + 0.5) * (in_w / out_w) - 0.5
    sy = np.clip(sy, 0.0, in_h - 1.0)
    sx = np.clip(sx, 0.0, in_w - 1.0)
    syg, sxg = np.meshgrid(sy, sx, indexing="ij")
    return _sample_bilinear(np.asarray(img, dtype=np.float64), syg, sxg)


def affine_warp(img, matrix, out_h, out_w, fill):
    img = np.asarray(img, dtype=np.float64)
    in_h, in_w = img.shape
    jj, ii = np.meshgrid(
        np.arange(out_w, dtype=np.float64),
        np.arange(out_h, dtype=np.float64),
        indexing="xy",
    )
    sx = matrix[0, 0] * jj + matrix[0, 1] * ii + matrix[0, 2]
    sy = matrix[1, 0] * jj + matrix[1, 1] * ii + matrix[1, 2]
    inside = (sx >= 0.0) & (sx <= in_w - 1) & (sy >= 0.0) & (sy <= in_h - 1)
    out = np.full((out_h, out_w), float(fill), dtype=np.float64)
    if np.any(inside):
        vals = _sample_bilinear(img, np.clip(sy, 0, in_h - 1), np.clip(sx, 0, in_w - 1))
        out[inside] = vals[inside]
    return out
