"""Facial state vector registry.

The canonical face state is a 55-vector: 52 expression coefficients in
[0, 1000] followed by head yaw, pitch, roll in degrees, each in [-90, 90].
The coefficient set is the standard 52-name expression basis used by
commodity face trackers, stored here in alphabetical order. The order is
frozen under REGISTRY_VERSION; checkpoints and datasets record that version
so stale artifacts are detected instead of silently misread.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidArgumentError

REGISTRY_VERSION = "bs52-v1"

BLENDSHAPE_NAMES: tuple[str, ...] = (
    "browDownLeft",
    "browDownRight",
    "browInnerUp",
    "browOuterUpLeft",
    "browOuterUpRight",
    "cheekPuff",
    "cheekSquintLeft",
    "cheekSquintRight",
    "eyeBlinkLeft",
    "eyeBlinkRight",
    "eyeLookDownLeft",
    "eyeLookDownRight",
    "eyeLookInLeft",
    "eyeLookInRight",
    "eyeLookOutLeft",
    "eyeLookOutRight",
    "eyeLookUpLeft",
    "eyeLookUpRight",
    "eyeSquintLeft",
    "eyeSquintRight",
    "eyeWideLeft",
    "eyeWideRight",
    "jawForward",
    "jawLeft",
    "jawOpen",
    "jawRight",
    "mouthClose",
    "mouthDimpleLeft",
    "mouthDimpleRight",
    "mouthFrownLeft",
    "mouthFrownRight",
    "mouthFunnel",
    "mouthLeft",
    "mouthLowerDownLeft",
    "mouthLowerDownRight",
    "mouthPressLeft",
    "mouthPressRight",
    "mouthPucker",
    "mouthRight",
    "mouthRollLower",
    "mouthRollUpper",
    "mouthShrugLower",
    "mouthShrugUpper",
    "mouthSmileLeft",
    "mouthSmileRight",
    "mouthStretchLeft",
    "mouthStretchRight",
    "mouthUpperUpLeft",
    "mouthUpperUpRight",
    "noseSneerLeft",
    "noseSneerRight",
    "tongueOut",
)

ANGLE_NAMES: tuple[str, ...] = ("yaw", "pitch", "roll")

N_BLENDSHAPES = len(BLENDSHAPE_NAMES)
N_ANGLES = len(ANGLE_NAMES)
STATE_DIM = N_BLENDSHAPES + N_ANGLES

BLENDSHAPE_RANGE = (0.0, 1000.0)
ANGLE_RANGE = (-90.0, 90.0)

STATE_COLUMNS: tuple[str, ...] = tuple(
    f"b{i:02d}" for i in range(N_BLENDSHAPES)
) + ANGLE_NAMES


def state_lo() -> np.ndarray:
    lo = np.empty(STATE_DIM)
    lo[:N_BLENDSHAPES] = BLENDSHAPE_RANGE[0]
    lo[N_BLENDSHAPES:] = ANGLE_RANGE[0]
    return lo


def state_hi() -> np.ndarray:
    hi = np.empty(STATE_DIM)
    hi[:N_BLENDSHAPES] = BLENDSHAPE_RANGE[1]
    hi[N_BLENDSHAPES:] = ANGLE_RANGE[1]
    return hi


def validate_states(states: np.ndarray, *, what: str = "state") -> np.ndarray:
    """Check shape (..., 55) and per-dimension ranges; returns float64 view."""
    arr = np.asarray(states, dtype=np.float64)
    if arr.shape[-1] != STATE_DIM:
        raise InvalidArgumentError(
            f"{what}: expected last dimension {STATE_DIM}, got {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"{what}: non-finite values")
    flat = arr.reshape(-1, STATE_DIM)
    lo, hi = state_lo(), state_hi()
    if np.any(flat < lo) or np.any(flat > hi):
        raise InvalidArgumentError(f"{what}: values outside the registry ranges")
    return arr


def clamp_states(states: np.ndarray) -> np.ndarray:
    """Clip (..., 55) onto the registry ranges (used on model outputs)."""
    arr = np.asarray(states, dtype=np.float64)
    return np.clip(arr, state_lo(), state_hi())


def normalize_states(states: np.ndarray) -> np.ndarray:
    """Map raw units onto the training scale: coefficients /1000, angles /90."""
    arr = np.asarray(states, dtype=np.float64).copy()
    arr[..., :N_BLENDSHAPES] /= BLENDSHAPE_RANGE[1]
    arr[..., N_BLENDSHAPES:] /= ANGLE_RANGE[1]
    return arr


def denormalize_states(states: np.ndarray) -> np.ndarray:
    arr = np.asarray(states, dtype=np.float64).copy()
    arr[..., :N_BLENDSHAPES] *= BLENDSHAPE_RANGE[1]
    arr[..., N_BLENDSHAPES:] *= ANGLE_RANGE[1]
    return arr
