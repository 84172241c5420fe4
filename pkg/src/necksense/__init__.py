"""necksense: neck-camera facial reconstruction and reaction-based
error detection, end to end on synthetic data.

Two stages: a CNN regressor maps dual infrared neck-camera frames to a
55-dim facial state (52 expression coefficients + head yaw/pitch/roll),
and a zoo of time-series classifiers turns sliding windows of those states
into neutral-vs-error decisions. A seeded synthetic world stands in for
human capture so every pipeline stage is testable against ground truth.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DataError,
    InvalidArgumentError,
    NeckSenseError,
    TrainingError,
)
from .registry import (
    ANGLE_NAMES,
    BLENDSHAPE_NAMES,
    N_ANGLES,
    N_BLENDSHAPES,
    REGISTRY_VERSION,
    STATE_COLUMNS,
    STATE_DIM,
)

__all__ = [
    "__version__",
    "NeckSenseError",
    "ConfigError",
    "InvalidArgumentError",
    "DataError",
    "TrainingError",
    "REGISTRY_VERSION",
    "BLENDSHAPE_NAMES",
    "ANGLE_NAMES",
    "STATE_COLUMNS",
    "N_BLENDSHAPES",
    "N_ANGLES",
    "STATE_DIM",
]
