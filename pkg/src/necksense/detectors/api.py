"""Detector zoo: one build/train/predict surface over every architecture.

Window detectors consume (N, F, L) window tensors; the frame detector
consumes (N, 3, H, W) images. Torch architectures standardize features
per channel with statistics fit on their training windows; the
random-kernel detector standardizes inside its ridge pipeline.
"""

from __future__ import annotations

import copy
import warnings
from dataclasses import dataclass, replace

import numpy as np
import torch
from torch import nn

from ..errors import InvalidArgumentError, TrainingError
from ..reaction import WindowSet
from ..seeding import rng_for, seed_for
from ..synthetic.oracle import DegenerateLabelsError
from .minirocket import (
    MIN_INPUT_LENGTH,
    fit_minirocket_params,
    make_ridge,
    minirocket_transform,
    ridge_probabilities,
)
from .nets import GMLP, GRUFCN, InceptionTime, LSTMNet, MLDNN, TransformerNet

WINDOW_ARCHS = (
    "gru_fcn",
    "gmlp",
    "inception_time",
    "minirocket",
    "ml_dnn",
    "lstm",
    "bilstm",
    "transformer",
)
FRAME_ARCHS = ("frame_resnet34",)
ARCHS = WINDOW_ARCHS + FRAME_ARCHS


@dataclass(frozen=True)
class DetectorSpec:
    arch: str = "gru_fcn"
    feature_dim: int = 55
    interval_len: int = 80
    n_classes: int = 2
    hidden: int = 100
    dropout: float = 0.8
    dropout_fc: float = 0.3
    mr_num_features: int = 9996
    mr_max_dilations: int = 32
    seed: int = 0

    def __post_init__(self):
        if self.arch not in ARCHS:
            raise InvalidArgumentError(
                f"unknown architecture {self.arch!r}; known: {', '.join(ARCHS)}"
            )
        if self.feature_dim < 1 or self.interval_len < 1:
            raise InvalidArgumentError("feature_dim and interval_len must be >= 1")
        if self.n_classes < 2:
            raise InvalidArgumentError("need at least 2 classes")
        if self.arch == "minirocket" and self.interval_len < MIN_INPUT_LENGTH:
            raise InvalidArgumentError(
                f"minirocket needs windows of length >= {MIN_INPUT_LENGTH}"
            )


@dataclass(frozen=True)
class DetectorSchedule:
    epochs: int = 500
    batch_size: int = 256
    lr: float = 2e-4
    weight_decay: float = 0.0
    val_fraction: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise InvalidArgumentError("epochs must be >= 1")
        if self.batch_size < 1:
            raise InvalidArgumentError("batch_size must be >= 1")
        if not (0.0 < self.val_fraction < 1.0):
            raise InvalidArgumentError("val_fraction must be in (0, 1)")


class Detector:
    """Trained-or-untrained classifier with a uniform predict surface."""

    def __init__(self, spec: DetectorSpec):
        self.spec = spec
        self.trained = False
        self.module: nn.Module | None = None
        self.adapter: nn.Module | None = None
        self.input_dim = spec.feature_dim  # changes after cross-space transfer
        self.norm_mean: np.ndarray | None = None
        self.norm_std: np.ndarray | None = None
        self.mr_params = None
        self.mr_pipeline = None
        if spec.arch not in ("minirocket",):
            torch.manual_seed(seed_for(spec.seed, "detector-init", spec.arch))
            self.module = _build_module(spec)

    def clone(self) -> "Detector":
        return copy.deepcopy(self)


def _build_module(spec: DetectorSpec) -> nn.Module:
    if spec.arch == "gru_fcn":
        return GRUFCN(
            spec.feature_dim,
            spec.n_classes,
            hidden=spec.hidden,
            dropout=spec.dropout,
            dropout_fc=spec.dropout_fc,
        )
    if spec.arch == "ml_dnn":
        return MLDNN(spec.feature_dim, spec.interval_len, spec.n_classes)
    if spec.arch == "gmlp":
        return GMLP(spec.feature_dim, spec.interval_len, spec.n_classes)
    if spec.arch == "inception_time":
        return InceptionTime(spec.feature_dim, spec.n_classes)
    if spec.arch == "lstm":
        return LSTMNet(spec.feature_dim, spec.n_classes, hidden=spec.hidden)
    if spec.arch == "bilstm":
        return LSTMNet(
            spec.feature_dim, spec.n_classes, hidden=spec.hidden, bidirectional=True
        )
    if spec.arch == "transformer":
        return TransformerNet(spec.feature_dim, spec.interval_len, spec.n_classes)
    if spec.arch == "frame_resnet34":
        return _build_frame_resnet(spec.n_classes)
    raise InvalidArgumentError(f"no module builder for {spec.arch!r}")


def _build_frame_resnet(n_classes: int) -> nn.Module:
    from torchvision import models

    try:
        net = models.resnet34(weights=models.ResNet34_Weights.IMAGENET1K_V1)
    except Exception as exc:  # offline boxes: fall back to random init
        warnings.warn(
            f"pretrained weights unavailable ({exc}); using random initialization"
        )
        net = models.resnet34(weights=None)
    net.fc = nn.Linear(net.fc.in_features, n_classes)
    return net


def build_detector(spec: DetectorSpec | None = None) -> Detector:
    return Detector(spec or DetectorSpec())


def _head_module(module: nn.Module) -> nn.Module:
    if hasattr(module, "head"):
        return module.head
    if hasattr(module, "fc"):
        return module.fc
    if hasattr(module, "net"):  # MLDNN: last linear of the stack
        return module.net[-1]
    raise InvalidArgumentError("module has no recognizable classifier head")


def trunk_state(det: Detector) -> dict:
    """Everything outside the classifier head: frozen params plus all buffers.

    Used to audit last-layer transfer: the trunk of a transferred detector
    must hash identically to its parent's.
    """
    if det.spec.arch == "minirocket":
        raise InvalidArgumentError("random-kernel detectors have no torch trunk")
    head_ids = {id(p) for p in _head_module(det.module).parameters()}
    state = {
        name: param.detach()
        for name, param in det.module.named_parameters()
        if id(param) not in head_ids
    }
    for name, buf in det.module.named_buffers():
        state[name] = buf.detach()
    return state


def _check_windows(det: Detector, X: np.ndarray, what: str) -> np.ndarray:
    X = np.asarray(X, dtype=np.float32)
    if X.ndim != 3:
        raise InvalidArgumentError(f"{what} must be (N, F, L), got {X.shape}")
    if X.shape[1] != det.input_dim:
        raise InvalidArgumentError(
            f"{what} have {X.shape[1]} features, detector expects {det.input_dim}"
        )
    if X.shape[2] != det.spec.interval_len:
        raise InvalidArgumentError(
            f"{what} have length {X.shape[2]}, detector expects {det.spec.interval_len}"
        )
    return X


def _as_xy(data) -> tuple[np.ndarray, np.ndarray | None]:
    if isinstance(data, WindowSet):
        return data.X, data.y
    raise InvalidArgumentError("expected a WindowSet")


def _fit_standardizer(det: Detector, X: np.ndarray) -> None:
    mean = X.mean(axis=(0, 2))
    std = X.std(axis=(0, 2))
    std[std < 1e-6] = 1.0  # constant channels pass through unscaled
    det.norm_mean = mean.astype(np.float32)
    det.norm_std = std.astype(np.float32)


def _standardize(det: Detector, X: np.ndarray) -> np.ndarray:
    return (X - det.norm_mean[None, :, None]) / det.norm_std[None, :, None]


def _forward(det: Detector, x: torch.Tensor) -> torch.Tensor:
    if det.adapter is not None:
        x = det.adapter(x)
    return det.module(x)


def _split_train_val(
    n: int, val_fraction: float, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    perm = rng_for(seed, "detector-split").permutation(n)
    n_val = min(max(1, int(round(val_fraction * n))), n - 1)
    return np.sort(perm[n_val:]), np.sort(perm[:n_val])


def _accuracy(labels: np.ndarray, y: np.ndarray) -> float:
    return float(np.mean(labels == y)) if len(y) else 0.0


def train_detector(
    det: Detector,
    train_windows: WindowSet,
    schedule: DetectorSchedule = DetectorSchedule(),
    val_windows: WindowSet | None = None,
) -> tuple[Detector, list[dict]]:
    """Fit in place; returns (detector, per-epoch history).

    Runs the full epoch budget with no early stopping and restores the
    weights of the epoch with the best validation accuracy. The
    random-kernel detector fits in one shot: its history has one entry.
    """
    if det.spec.arch in FRAME_ARCHS:
        raise InvalidArgumentError(
            f"{det.spec.arch} trains on frame images; use train_frame_detector"
        )
    X, y = _as_xy(train_windows)
    X = _check_windows(det, X, "training windows")
    classes = np.unique(y)
    if len(classes) < 2:
        raise DegenerateLabelsError(
            f"training windows contain only class {classes.tolist()}; "
            "need both classes to fit a detector"
        )

    if val_windows is not None:
        X_val = _check_windows(det, val_windows.X, "validation windows")
        y_val = val_windows.y
        X_tr, y_tr = X, y
    else:
        tr_idx, val_idx = _split_train_val(len(X), schedule.val_fraction, schedule.seed)
        X_tr, y_tr = X[tr_idx], y[tr_idx]
        X_val, y_val = X[val_idx], y[val_idx]
        if len(np.unique(y_tr)) < 2:
            raise DegenerateLabelsError(
                "train split lost a class; provide val_windows explicitly"
            )

    if det.spec.arch == "minirocket":
        det.mr_params = fit_minirocket_params(
            X_tr,
            num_features=det.spec.mr_num_features,
            max_dilations_per_kernel=det.spec.mr_max_dilations,
            seed=det.spec.seed,
        )
        feats = minirocket_transform(X_tr, det.mr_params)
        det.mr_pipeline = make_ridge()
        det.mr_pipeline.fit(feats, y_tr)
        det.trained = True
        train_acc = _accuracy(det.mr_pipeline.predict(feats), y_tr)
        val_feats = minirocket_transform(X_val, det.mr_params)
        val_acc = _accuracy(det.mr_pipeline.predict(val_feats), y_val)
        return det, [
            {"epoch": 1, "train_loss": 1.0 - train_acc, "val_accuracy": val_acc}
        ]

    _fit_standardizer(det, X_tr)
    return _train_torch(det, X_tr, y_tr, X_val, y_val, schedule)


def _train_torch(det, X_tr, y_tr, X_val, y_val, schedule) -> tuple[Detector, list[dict]]:
    module = det.module
    params = [p for p in module.parameters() if p.requires_grad]
    if det.adapter is not None:
        params += [p for p in det.adapter.parameters() if p.requires_grad]
    if not params:
        raise TrainingError("no trainable parameters")
    optimizer = torch.optim.Adam(
        params, lr=schedule.lr, weight_decay=schedule.weight_decay
    )
    loss_fn = nn.CrossEntropyLoss()
    torch.manual_seed(seed_for(schedule.seed, "detector-train", det.spec.arch))

    Xz = _standardize(det, X_tr)
    Xv = _standardize(det, X_val)
    y_tr_t = torch.from_numpy(np.asarray(y_tr, dtype=np.int64))

    # transfer runs keep the trunk in eval mode so frozen statistics and
    # dropout masks cannot drift; fresh training uses normal train mode
    frozen_trunk = any(not p.requires_grad for p in module.parameters())

    history: list[dict] = []
    best_acc = -1.0
    best_state = None

    def snapshot():
        state = {"module": copy.deepcopy(module.state_dict())}
        if det.adapter is not None:
            state["adapter"] = copy.deepcopy(det.adapter.state_dict())
        return state

    for epoch in range(schedule.epochs):
        module.eval() if frozen_trunk else module.train()
        if det.adapter is not None:
            det.adapter.train()
        order = rng_for(schedule.seed, "detector-epoch", epoch).permutation(len(Xz))
        total, seen = 0.0, 0
        for start in range(0, len(order), schedule.batch_size):
            idx = order[start : start + schedule.batch_size]
            if len(idx) == 1 and schedule.batch_size > 1 and seen > 0:
                continue  # trailing singleton skews batch statistics
            xb = torch.from_numpy(Xz[idx])
            yb = y_tr_t[torch.from_numpy(idx)]
            optimizer.zero_grad()
            loss = loss_fn(_forward(det, xb), yb)
            loss.backward()
            optimizer.step()
            total += float(loss.item()) * len(idx)
            seen += len(idx)

        val_labels = _predict_standardized(det, Xv, det.spec.n_classes)[0]
        val_acc = _accuracy(val_labels, y_val)
        history.append(
            {
                "epoch": epoch + 1,
                "train_loss": total / max(seen, 1),
                "val_accuracy": val_acc,
            }
        )
        if val_acc > best_acc:
            best_acc = val_acc
            best_state = snapshot()

    if best_state is not None:
        module.load_state_dict(best_state["module"])
        if det.adapter is not None:
            det.adapter.load_state_dict(best_state["adapter"])
    det.trained = True
    return det, history


def _predict_standardized(
    det: Detector, Xz: np.ndarray, n_classes: int, batch_size: int = 512
) -> tuple[np.ndarray, np.ndarray]:
    module = det.module
    module.eval()
    if det.adapter is not None:
        det.adapter.eval()
    outs = []
    with torch.no_grad():
        for start in range(0, len(Xz), batch_size):
            logits = _forward(det, torch.from_numpy(Xz[start : start + batch_size]))
            outs.append(torch.softmax(logits.double(), dim=1).numpy())
    probs = (
        np.concatenate(outs, axis=0) if outs else np.zeros((0, n_classes), dtype=np.float64)
    )
    return probs.argmax(axis=1), probs


def predict(det: Detector, windows) -> tuple[np.ndarray, np.ndarray]:
    """(labels, probabilities); probability rows sum to 1 within 1e-6."""
    if not det.trained:
        raise InvalidArgumentError("detector is not trained yet")
    X = windows.X if isinstance(windows, WindowSet) else windows
    X = _check_windows(det, X, "windows")
    if det.spec.arch == "minirocket":
        feats = minirocket_transform(X, det.mr_params)
        probs = ridge_probabilities(det.mr_pipeline, feats)
        return probs.argmax(axis=1), probs
    return _predict_standardized(det, _standardize(det, X), det.spec.n_classes)


def _check_frames(det: Detector, images: np.ndarray) -> np.ndarray:
    images = np.asarray(images, dtype=np.float32)
    if images.ndim != 4 or images.shape[1] != 3:
        raise InvalidArgumentError(f"expected (N, 3, H, W) images, got {images.shape}")
    return images


def train_frame_detector(
    det: Detector,
    images: np.ndarray,
    labels: np.ndarray,
    schedule: DetectorSchedule = DetectorSchedule(),
    val: tuple[np.ndarray, np.ndarray] | None = None,
) -> tuple[Detector, list[dict]]:
    """Per-frame image classifier training (same loop, image inputs)."""
    if det.spec.arch not in FRAME_ARCHS:
        raise InvalidArgumentError(f"{det.spec.arch} trains on windows, not frames")
    images = _check_frames(det, images)
    y = np.asarray(labels, dtype=np.int64)
    if len(images) != len(y):
        raise InvalidArgumentError("images and labels disagree in length")
    if len(np.unique(y)) < 2:
        raise DegenerateLabelsError("frame labels contain a single class")
    if val is not None:
        X_tr, y_tr = images, y
        X_val, y_val = _check_frames(det, val[0]), np.asarray(val[1], dtype=np.int64)
    else:
        tr_idx, val_idx = _split_train_val(len(images), schedule.val_fraction, schedule.seed)
        X_tr, y_tr = images[tr_idx], y[tr_idx]
        X_val, y_val = images[val_idx], y[val_idx]
        if len(np.unique(y_tr)) < 2:
            raise DegenerateLabelsError("frame train split lost a class; pass val")

    module = det.module
    optimizer = torch.optim.Adam(
        module.parameters(), lr=schedule.lr, weight_decay=schedule.weight_decay
    )
    loss_fn = nn.CrossEntropyLoss()
    torch.manual_seed(seed_for(schedule.seed, "detector-train", det.spec.arch))
    y_tr_t = torch.from_numpy(y_tr)

    history: list[dict] = []
    best_acc, best_state = -1.0, None
    for epoch in range(schedule.epochs):
        module.train()
        order = rng_for(schedule.seed, "detector-epoch", epoch).permutation(len(X_tr))
        total, seen = 0.0, 0
        for start in range(0, len(order), schedule.batch_size):
            idx = order[start : start + schedule.batch_size]
            if len(idx) == 1 and schedule.batch_size > 1 and seen > 0:
                continue
            optimizer.zero_grad()
            loss = loss_fn(module(torch.from_numpy(X_tr[idx])), y_tr_t[torch.from_numpy(idx)])
            loss.backward()
            optimizer.step()
            total += float(loss.item()) * len(idx)
            seen += len(idx)
        val_labels = predict_frames(det, X_val, _trained_check=False)[0]
        val_acc = _accuracy(val_labels, y_val)
        history.append(
            {"epoch": epoch + 1, "train_loss": total / max(seen, 1), "val_accuracy": val_acc}
        )
        if val_acc > best_acc:
            best_acc = val_acc
            best_state = copy.deepcopy(module.state_dict())
    if best_state is not None:
        module.load_state_dict(best_state)
    det.trained = True
    return det, history


def predict_frames(
    det: Detector, images: np.ndarray, batch_size: int = 64, _trained_check: bool = True
) -> tuple[np.ndarray, np.ndarray]:
    if det.spec.arch not in FRAME_ARCHS:
        raise InvalidArgumentError(f"{det.spec.arch} predicts on windows, not frames")
    if _trained_check and not det.trained:
        raise InvalidArgumentError("detector is not trained yet")
    images = _check_frames(det, images)
    det.module.eval()
    outs = []
    with torch.no_grad():
        for start in range(0, len(images), batch_size):
            logits = det.module(torch.from_numpy(images[start : start + batch_size]))
            outs.append(torch.softmax(logits.double(), dim=1).numpy())
    probs = (
        np.concatenate(outs, axis=0)
        if outs
        else np.zeros((0, det.spec.n_classes), dtype=np.float64)
    )
    return probs.argmax(axis=1), probs


def finetune_last_layer(
    det: Detector,
    new_windows: WindowSet,
    schedule: DetectorSchedule = DetectorSchedule(),
    val_windows: WindowSet | None = None,
) -> tuple[Detector, list[dict]]:
    """Transfer to a new window distribution, updating only the head.

    Returns a new detector; the input one is untouched. Every trunk
    parameter and buffer stays bit-identical. When the new windows have
    a different channel count, a fresh 1x1 convolution maps them into
    the trained channel space and is trained together with the head.
    """
    if not det.trained:
        raise InvalidArgumentError("finetune_last_layer needs a trained detector")
    X, y = _as_xy(new_windows)
    if len(np.unique(y)) < 2:
        raise DegenerateLabelsError("transfer windows contain a single class")

    out = det.clone()
    if det.spec.arch == "minirocket":
        if X.shape[1] != det.input_dim:
            raise InvalidArgumentError(
                "the random-kernel channel plan is bound to the trained feature "
                f"dimension ({det.input_dim}); cannot transfer to {X.shape[1]}"
            )
        X = _check_windows(out, X, "transfer windows")
        feats = minirocket_transform(X, out.mr_params)  # params stay frozen
        out.mr_pipeline = make_ridge()
        out.mr_pipeline.fit(feats, y)
        acc = _accuracy(out.mr_pipeline.predict(feats), y)
        return out, [{"epoch": 1, "train_loss": 1.0 - acc, "val_accuracy": acc}]

    new_dim = X.shape[1]
    if new_dim != out.input_dim:
        torch.manual_seed(seed_for(det.spec.seed, "adapter-init", new_dim))
        out.adapter = nn.Conv1d(new_dim, out.input_dim, 1)
        out.input_dim = new_dim
    X = _check_windows(out, X, "transfer windows")

    for p in out.module.parameters():
        p.requires_grad = False
    for p in _head_module(out.module).parameters():
        p.requires_grad = True

    if val_windows is not None:
        X_val = _check_windows(out, val_windows.X, "validation windows")
        y_val = val_windows.y
        X_tr, y_tr = X, y
    else:
        tr_idx, val_idx = _split_train_val(len(X), schedule.val_fraction, schedule.seed)
        X_tr, y_tr = X[tr_idx], y[tr_idx]
        X_val, y_val = X[val_idx], y[val_idx]
        if len(np.unique(y_tr)) < 2:
            raise DegenerateLabelsError(
                "transfer train split lost a class; provide val_windows explicitly"
            )

    _fit_standardizer(out, X_tr)
    out.trained = False
    result, history = _train_torch(out, X_tr, y_tr, X_val, y_val, schedule)
    return result, history
