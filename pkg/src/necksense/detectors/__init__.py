"""Reaction detectors: sliding-window classifiers over feature streams.

Nine architectures behind one build/train/predict surface; a
random-convolution + ridge detector and a frame-image baseline round
out the recurrent/convolutional/attention families.
"""

from .api import (
    ARCHS,
    FRAME_ARCHS,
    WINDOW_ARCHS,
    Detector,
    DetectorSchedule,
    DetectorSpec,
    build_detector,
    finetune_last_layer,
    trunk_state,
    predict,
    predict_frames,
    train_detector,
    train_frame_detector,
)
from .checkpoint import detector_fingerprint, load_detector, save_detector
from .minirocket import fit_minirocket_params, minirocket_transform

__all__ = [
    "ARCHS",
    "WINDOW_ARCHS",
    "FRAME_ARCHS",
    "Detector",
    "DetectorSpec",
    "DetectorSchedule",
    "build_detector",
    "train_detector",
    "train_frame_detector",
    "predict",
    "predict_frames",
    "finetune_last_layer",
    "trunk_state",
    "detector_fingerprint",
    "save_detector",
    "load_detector",
    "fit_minirocket_params",
    "minirocket_transform",
]
