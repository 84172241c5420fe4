"""Parametric IR rendering: anatomy-seeded Gaussian blobs.

Each camera view is a constant background plus ~22 soft blobs whose
positions and intensities are affine in the normalized face state
(coefficients /1000, angles /90). Every state dimension drives exactly
two blobs per camera with floor-bounded weights, so distinct states are
guaranteed to produce visibly distinct images, while the map stays smooth
enough for a CNN to invert. Anatomy is resolution-independent: geometry
lives in unit coordinates and scales with the requested raster size.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .. import kernels
from ..errors import InvalidArgumentError
from ..registry import N_BLENDSHAPES, STATE_DIM, validate_states
from ..seeding import rng_for

N_BLOBS = 22
BACKGROUND = 0.08
SIDES = ("left", "right")

DEFAULT_HEIGHT = 480
DEFAULT_WIDTH = 640


@dataclass(frozen=True, eq=False)
class BlobModel:
    centers: np.ndarray  # (K, 2) unit coords (row, col)
    sigmas: np.ndarray  # (K,) fraction of width
    amps: np.ndarray  # (K,) base amplitudes
    pos_coup: np.ndarray  # (K, 2, 55) unit-coord shift per unit normalized state
    amp_coup: np.ndarray  # (K, 55) amplitude shift per unit normalized state


@lru_cache(maxsize=256)
def _blob_model(anatomy_seed: int, side: str) -> BlobModel:
    rng = rng_for(anatomy_seed, "blobs", side)
    centers = rng.uniform(0.15, 0.85, size=(N_BLOBS, 2))
    sigmas = rng.uniform(0.045, 0.10, size=N_BLOBS)
    amps = rng.uniform(0.30, 0.60, size=N_BLOBS)

    pos_coup = np.zeros((N_BLOBS, 2, STATE_DIM))
    amp_coup = np.zeros((N_BLOBS, STATE_DIM))
    # each state dim drives two distinct blobs; magnitudes floored away
    # from zero so no dimension is ever visually silent
    for d in range(STATE_DIM):
        for blob in (d % N_BLOBS, (d + 7) % N_BLOBS):
            angle = rng.uniform(0.0, 2.0 * np.pi)
            radius = rng.uniform(0.025, 0.055)
            pos_coup[blob, 0, d] += radius * np.sin(angle)
            pos_coup[blob, 1, d] += radius * np.cos(angle)
            amp_coup[blob, d] += rng.uniform(0.20, 0.45) * rng.choice((-1.0, 1.0))
    return BlobModel(
        centers=centers, sigmas=sigmas, amps=amps, pos_coup=pos_coup, amp_coup=amp_coup
    )


def normalized_state(state: np.ndarray) -> np.ndarray:
    z = np.asarray(state, dtype=np.float64).copy()
    z[:N_BLENDSHAPES] /= 1000.0
    z[N_BLENDSHAPES:] /= 90.0
    return z


def render_view(
    state: np.ndarray,
    anatomy_seed: int,
    side: str,
    height: int = DEFAULT_HEIGHT,
    width: int = DEFAULT_WIDTH,
) -> np.ndarray:
    """Noise-free single view; float64 (height, width) in [0,1]."""
    if side not in SIDES:
        raise InvalidArgumentError(f"unknown camera side {side!r}")
    model = _blob_model(int(anatomy_seed), side)
    z = normalized_state(state)
    centers = model.centers + model.pos_coup @ z  # (K, 2) unit coords
    amps = np.clip(model.amps + model.amp_coup @ z, 0.05, 1.2)
    centers_px = np.empty_like(centers)
    centers_px[:, 0] = centers[:, 0] * (height - 1)
    centers_px[:, 1] = centers[:, 1] * (width - 1)
    sigmas_px = model.sigmas * width
    img = kernels.render_blobs(
        int(height),
        int(width),
        np.ascontiguousarray(centers_px),
        np.ascontiguousarray(sigmas_px),
        np.ascontiguousarray(amps),
        BACKGROUND,
    )
    return np.clip(img, 0.0, 1.0)


def render_frame_pair(
    state: np.ndarray,
    profile,
    rng: np.random.Generator | None = None,
    height: int = DEFAULT_HEIGHT,
    width: int = DEFAULT_WIDTH,
    pixel_noise_per_unit: float = 5e-4,
) -> tuple[np.ndarray, np.ndarray]:
    """Both camera views for one state; additive sensor noise when rng given.

    Noise sigma is profile.noise_sigma * pixel_noise_per_unit intensity
    units, applied independently per view. Deterministic given the rng.
    """
    validate_states(state, what="render state")
    views = []
    sigma = float(profile.noise_sigma) * float(pixel_noise_per_unit)
    for side in SIDES:
        img = render_view(state, profile.anatomy_seed, side, height, width)
        if rng is not None and sigma > 0.0:
            img = img + rng.normal(0.0, sigma, size=img.shape)
        views.append(np.clip(img, 0.0, 1.0).astype(np.float32))
    return views[0], views[1]
