"""Image kernels, njit-compatible loop form.

The compiled backend jits these directly. The numpy backend ships
vectorized equivalents (same math, different evaluation order), so image
kernels agree across backends to 1e-6 rather than bit-for-bit; tests pin
that tolerance.
"""

from __future__ import annotations

import numpy as np


def render_blobs_impl(height, width, centers, sigmas, amps, background):
    """Sum of isotropic Gaussian blobs over a constant background.

    centers: (K, 2) as (row, col) in pixels; sigmas: (K,) in pixels;
    amps: (K,) peak amplitudes. Returns float64 (height, width), unclipped.
    """
    img = np.full((height, width), background, dtype=np.float64)
    vy = np.empty(height, dtype=np.float64)
    vx = np.empty(width, dtype=np.float64)
    for k in range(centers.shape[0]):
        cy = centers[k, 0]
        cx = centers[k, 1]
        s = sigmas[k]
        a = amps[k]
        for i in range(height):
            t = (i - cy) / s
            vy[i] = np.exp(-0.5 * t * t)
        for j in range(width):
            t = (j - cx) / s
            vx[j] = np.exp(-0.5 * t * t)
        for i in range(height):
            row_v = vy[i]
            for j in range(width):
                img[i, j] += a * (row_v * vx[j])
    return img


def bilinear_resize_impl(img, out_h, out_w):
    """Half-pixel-centered bilinear resample of a 2-D float array."""
    in_h, in_w = img.shape
    out = np.empty((out_h, out_w), dtype=np.float64)
    scale_y = in_h / out_h
    scale_x = in_w / out_w
    for i in range(out_h):
        sy = (i + 0.5) * scale_y - 0.5
        if sy < 0.0:
            sy = 0.0
        if sy > in_h - 1:
            sy = in_h - 1.0
        y0 = int(np.floor(sy))
        y1 = y0 + 1
        if y1 > in_h - 1:
            y1 = in_h - 1
        fy = sy - y0
        for j in range(out_w):
            sx = (j + 0.5) * scale_x - 0.5
            if sx < 0.0:
                sx = 0.0
            if sx > in_w - 1:
                sx = in_w - 1.0
            x0 = int(np.floor(sx))
            x1 = x0 + 1
            if x1 > in_w - 1:
                x1 = in_w - 1
            fx = sx - x0
            out[i, j] = (
                ((1.0 - fy) * (1.0 - fx)) * img[y0, x0]
                + ((1.0 - fy) * fx) * img[y0, x1]
                + (fy * (1.0 - fx)) * img[y1, x0]
                + (fy * fx) * img[y1, x1]
            )
    return out


def affine_warp_impl(img, matrix, out_h, out_w, fill):
    """Inverse-mapped affine resample with constant fill outside the source.

    matrix: (2, 3) mapping output (x=col, y=row) to input coordinates:
    src_x = m[0,0]*x + m[0,1]*y + m[0,2]; src_y = m[1,0]*x + m[1,1]*y + m[1,2].
    """
    in_h, in_w = img.shape
    out = np.empty((out_h, out_w), dtype=np.float64)
    m00 = matrix[0, 0]
    m01 = matrix[0, 1]
    m02 = matrix[0, 2]
    m10 = matrix[1, 0]
    m11 = matrix[1, 1]
    m12 = matrix[1, 2]
    for i in range(out_h):
        for j in range(out_w):
            sx = m00 * j + m01 * i + m02
            sy = m10 * j + m11 * i + m12
            if sx < 0.0 or sx > in_w - 1 or sy < 0.0 or sy > in_h - 1:
                out[i, j] = fill
                continue
            x0 = int(np.floor(sx))
            x1 = x0 + 1
            if x1 > in_w - 1:
                x1 = in_w - 1
            y0 = int(np.floor(sy))
            y1 = y0 + 1
            if y1 > in_h - 1:
                y1 = in_h - 1
            fx = sx - x0
            fy = sy - y0
            out[i, j] = (
                ((1.0 - fy) * (1.0 - fx)) * img[y0, x0]
                + ((1.0 - fy) * fx) * img[y0, x1]
                + (fy * (1.0 - fx)) * img[y1, x0]
                + (fy * fx) * img[y1, x1]
            )
    return out
