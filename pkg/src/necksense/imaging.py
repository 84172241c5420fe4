"""Dual-camera frame preparation.

Raw capture is a pair of single-channel images. The model-ready form is a
single tile: each image grayscaled, resized to half-tile size, and the two
placed side by side (left camera on the left). Stage-dependent random
augmentation (scale / rotate / translate, each gated at p=0.5) operates on
the two halves as separate canvases with one shared parameter draw, so
per-camera geometry is preserved. A separate 224-square ImageNet
normalization serves the frame-based classifiers.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .errors import InvalidArgumentError

IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)


@dataclass(frozen=True)
class ImagingConfig:
    """Geometry of the tiled model input.

    Default matches the deployed sensor: 640x480 raw frames, halves
    resized to 320x240, tile 640x240. `scaled` shrinks everything for
    fast CPU runs while keeping the 2:1 half aspect.
    """

    half_width: int = 320
    half_height: int = 240

    @property
    def tile_shape(self) -> tuple[int, int]:
        return (self.half_height, 2 * self.half_width)

    def scaled(self, factor: float) -> "ImagingConfig":
        if factor <= 0:
            raise InvalidArgumentError("scale factor must be positive")
        return ImagingConfig(
            half_width=max(8, int(round(self.half_width * factor))),
            half_height=max(8, int(round(self.half_height * factor))),
        )


@dataclass(frozen=True)
class AugmentPolicy:
    stage: str = "none"  # pretrain | finetune | none
    p_scale: float = 0.5
    p_rotate: float = 0.5
    p_translate: float = 0.5
    scale_range: tuple[float, float] = (0.9, 1.1)
    rotate_range_deg: tuple[float, float] = (-30.0, 30.0)
    translate_range_px: tuple[float, float] = (-6.0, 6.0)

    def __post_init__(self):
        if self.stage not in ("pretrain", "finetune", "none"):
            raise InvalidArgumentError(f"unknown augment stage {self.stage!r}")


def augment_policy(stage: str, translate_scale: float = 1.0) -> AugmentPolicy:
    """Stage defaults: rotation ±30° when pretraining, ±8° when fine-tuning."""
    policy = AugmentPolicy(stage=stage)
    if stage == "finetune":
        policy = replace(policy, rotate_range_deg=(-8.0, 8.0))
    if translate_scale != 1.0:
        lo, hi = policy.translate_range_px
        policy = replace(
            policy, translate_range_px=(lo * translate_scale, hi * translate_scale)
        )
    return policy


def to_gray(image: np.ndarray) -> np.ndarray:
    """Single-channel float image in [0,1] from gray or RGB, uint8 or float."""
    arr = np.asarray(image)
    if arr.ndim == 3:
        if arr.shape[2] != 3:
            raise InvalidArgumentError(f"expected RGB last axis 3, got {arr.shape}")
        arr = arr.astype(np.float64)
        arr = 0.299 * arr[..., 0] + 0.587 * arr[..., 1] + 0.114 * arr[..., 2]
    elif arr.ndim != 2:
        raise InvalidArgumentError(f"expected 2-D or 3-D image, got shape {arr.shape}")
    arr = arr.astype(np.float64)
    if np.asarray(image).dtype == np.uint8:
        arr = arr / 255.0
    return np.clip(arr, 0.0, 1.0)


def preprocess_pair(
    left: np.ndarray, right: np.ndarray, config: ImagingConfig = ImagingConfig()
) -> np.ndarray:
    """Tile a camera pair: gray, resize each half, concatenate left|right."""
    left_arr = np.asarray(left)
    right_arr = np.asarray(right)
    if left_arr.shape != right_arr.shape:
        raise InvalidArgumentError(
            f"camera frames disagree in size: {left_arr.shape} vs {right_arr.shape}"
        )
    halves = []
    for img in (left_arr, right_arr):
        g = to_gray(img)
        halves.append(
            kernels.bilinear_resize(g, config.half_height, config.half_width)
        )
    tile = np.concatenate(halves, axis=1)
    return np.clip(tile, 0.0, 1.0).astype(np.float32)


def _inverse_affine(
    h: int, w: int, scale: float, angle_deg: float, tx: float, ty: float
) -> np.ndarray:
    # forward map: rotate+scale about the canvas center, then translate;
    # the warp kernel wants output->input, so invert
    cx = (w - 1) / 2.0
    cy = (h - 1) / 2.0
    theta = np.deg2rad(angle_deg)
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    rs = np.array(
        [
            [scale * cos_t, -scale * sin_t, 0.0],
            [scale * sin_t, scale * cos_t, 0.0],
            [0.0, 0.0, 1.0],
        ]
    )
    to_origin = np.array([[1, 0, -cx], [0, 1, -cy], [0, 0, 1]], dtype=np.float64)
    from_origin = np.array(
        [[1, 0, cx + tx], [0, 1, cy + ty], [0, 0, 1]], dtype=np.float64
    )
    forward = from_origin @ rs @ to_origin
    return np.linalg.inv(forward)[:2, :]


def augment(
    tile: np.ndarray, policy: AugmentPolicy, rng: np.random.Generator
) -> np.ndarray:
    """Randomly scale/rotate/translate both tile halves with one draw.

    Exactly seven rng draws per call (three gates, then scale, angle, tx,
    ty) regardless of which gates fire, so seeded streams stay aligned
    across policies.
    """
    arr = np.asarray(tile, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] % 2 != 0:
        raise InvalidArgumentError(f"tile must be 2-D with even width, got {arr.shape}")
    if policy.stage == "none":
        return arr.astype(np.float32)

    gate_scale = rng.random() < policy.p_scale
    gate_rotate = rng.random() < policy.p_rotate
    gate_translate = rng.random() < policy.p_translate
    scale = rng.uniform(*policy.scale_range)
    angle = rng.uniform(*policy.rotate_range_deg)
    tx = rng.uniform(*policy.translate_range_px)
    ty = rng.uniform(*policy.translate_range_px)

    if not gate_scale:
        scale = 1.0
    if not gate_rotate:
        angle = 0.0
    if not gate_translate:
        tx = 0.0
        ty = 0.0
    if scale == 1.0 and angle == 0.0 and tx == 0.0 and ty == 0.0:
        return arr.astype(np.float32)

    h, w = arr.shape
    half_w = w // 2
    matrix = _inverse_affine(h, half_w, scale, angle, tx, ty)
    out = np.empty_like(arr)
    for side in range(2):
        sl = slice(side * half_w, (side + 1) * half_w)
        out[:, sl] = kernels.affine_warp(
            np.ascontiguousarray(arr[:, sl]), matrix, h, half_w, 0.0
        )
    return np.clip(out, 0.0, 1.0).astype(np.float32)


def normalize_for_cnn(image: np.ndarray, size: int = 224) -> np.ndarray:
    """Square resize, 3-channel replicate, ImageNet standardization.

    Emits (3, size, size) float32 for the frame-based classifiers.
    """
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim == 2:
        chans = [arr, arr, arr]
    elif arr.ndim == 3 and arr.shape[2] == 3:
        chans = [arr[..., c] for c in range(3)]
    else:
        raise InvalidArgumentError(f"expected (H,W) or (H,W,3), got {arr.shape}")
    out = np.empty((3, size, size), dtype=np.float32)
    for c, chan in enumerate(chans):
        resized = kernels.bilinear_resize(chan, size, size)
        out[c] = ((resized - IMAGENET_MEAN[c]) / IMAGENET_STD[c]).astype(np.float32)
    return out
