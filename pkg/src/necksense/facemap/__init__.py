"""Face-state reconstruction from paired neck-camera IR frames.

A residual CNN maps the preprocessed two-camera tile to the 55-value
face state (52 blendshapes + 3 head angles). Training runs in two
stages: pretraining across many participants' calibration recordings,
then a short per-participant fine-tune that chains from the pretrained
checkpoint.
"""

from .model import FacemapConfig, FacemapModel, build_facemap, param_count
from .data import (
    FacemapDataset,
    concat_datasets,
    dataset_from_corpus_dir,
    dataset_from_sessions,
)
from .train import FacemapSchedule, evaluate_facemap, predict_states, train_facemap
from .folds import temporal_5fold, run_temporal_cv
from .reconstruct import reconstruct
from .checkpoint import load_checkpoint, save_checkpoint, state_fingerprint

__all__ = [
    "FacemapConfig",
    "FacemapModel",
    "build_facemap",
    "param_count",
    "FacemapDataset",
    "dataset_from_sessions",
    "dataset_from_corpus_dir",
    "concat_datasets",
    "FacemapSchedule",
    "train_facemap",
    "evaluate_facemap",
    "predict_states",
    "temporal_5fold",
    "run_temporal_cv",
    "reconstruct",
    "load_checkpoint",
    "save_checkpoint",
    "state_fingerprint",
]
