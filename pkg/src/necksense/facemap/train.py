"""Training loop for the reconstruction model.

L1 loss on normalized targets (blendshapes /1000, angles /90), Adam with
cosine learning-rate decay, fixed epoch count, best-validation weights
restored at the end. The history always has exactly `epochs` entries.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass

import numpy as np
import torch

from ..errors import InvalidArgumentError
from ..imaging import AugmentPolicy, augment
from ..metrics import mae_face
from ..registry import denormalize_states, normalize_states
from ..seeding import rng_for, seed_for
from .data import FacemapDataset
from .model import FacemapModel

STAGE_LR = {"pretrain": 2e-4, "finetune": 1e-4}


@dataclass(frozen=True)
class FacemapSchedule:
    stage: str = "pretrain"
    epochs: int = 30
    batch_size: int = 64
    lr: float | None = None  # stage default when unset
    val_fraction: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if self.stage not in STAGE_LR:
            raise InvalidArgumentError(
                f"stage must be one of {sorted(STAGE_LR)}, got {self.stage!r}"
            )
        if self.epochs < 1:
            raise InvalidArgumentError("epochs must be >= 1")
        if self.batch_size < 1:
            raise InvalidArgumentError("batch_size must be >= 1")
        if not (0.0 < self.val_fraction < 1.0):
            raise InvalidArgumentError("val_fraction must be in (0, 1)")

    @property
    def resolved_lr(self) -> float:
        return self.lr if self.lr is not None else STAGE_LR[self.stage]


def _batch_tiles(dataset: FacemapDataset, idx, policy, rng_tags, seed) -> torch.Tensor:
    tiles = []
    for i in idx:
        tile = dataset.tile(int(i))
        if policy is not None and policy.stage != "none":
            rng = rng_for(seed, "augment", *rng_tags, int(i))
            tile = augment(tile, policy, rng)
        tiles.append(np.asarray(tile, dtype=np.float32))
    return torch.from_numpy(np.stack(tiles)).unsqueeze(1)


def predict_states(
    model: FacemapModel, dataset: FacemapDataset, indices=None, batch_size: int = 64
) -> np.ndarray:
    """Denormalized (unclamped) predictions for the given dataset rows."""
    idx = np.arange(len(dataset)) if indices is None else np.asarray(indices)
    model.eval()
    outs = []
    with torch.no_grad():
        for start in range(0, len(idx), batch_size):
            chunk = idx[start : start + batch_size]
            x = _batch_tiles(dataset, chunk, None, (), 0)
            outs.append(model(x).numpy())
    preds = np.concatenate(outs, axis=0) if outs else np.zeros((0, model.config.output_dim))
    return denormalize_states(preds.astype(np.float64))


def evaluate_facemap(
    model: FacemapModel, dataset: FacemapDataset, batch_size: int = 64
) -> tuple[float, float]:
    """(blendshape MAE, angle MAE) in original units over a dataset."""
    if len(dataset) == 0:
        raise InvalidArgumentError("cannot evaluate on an empty dataset")
    preds = predict_states(model, dataset, batch_size=batch_size)
    return mae_face(preds, dataset.states)


def train_facemap(
    model: FacemapModel,
    dataset: FacemapDataset,
    schedule: FacemapSchedule = FacemapSchedule(),
    augment_policy: AugmentPolicy | None = None,
) -> tuple[FacemapModel, list[dict]]:
    """Train in place; returns (model with best-validation weights, history)."""
    n = len(dataset)
    if n == 0:
        raise InvalidArgumentError("cannot train on an empty dataset")
    if n < 2:
        raise InvalidArgumentError("training needs at least 2 examples")

    split_rng = rng_for(schedule.seed, "facemap-split")
    perm = split_rng.permutation(n)
    n_val = min(max(1, int(round(schedule.val_fraction * n))), n - 1)
    val_idx = np.sort(perm[:n_val])
    train_idx = np.sort(perm[n_val:])

    torch.manual_seed(seed_for(schedule.seed, "facemap-train"))
    optimizer = torch.optim.Adam(
        (p for p in model.parameters() if p.requires_grad), lr=schedule.resolved_lr
    )
    scheduler = torch.optim.lr_scheduler.CosineAnnealingLR(
        optimizer, T_max=schedule.epochs
    )
    targets = torch.from_numpy(normalize_states(dataset.states).astype(np.float32))
    loss_fn = torch.nn.L1Loss()

    val_truth = dataset.states[val_idx]
    history: list[dict] = []
    best_loss = np.inf
    best_state = copy.deepcopy(model.state_dict())

    for epoch in range(schedule.epochs):
        model.train()
        order = rng_for(schedule.seed, "facemap-epoch", epoch).permutation(train_idx)
        total, seen = 0.0, 0
        for start in range(0, len(order), schedule.batch_size):
            idx = order[start : start + schedule.batch_size]
            if len(idx) == 1 and schedule.batch_size > 1 and seen > 0:
                continue  # trailing singleton skews batch statistics
            x = _batch_tiles(dataset, idx, augment_policy, (epoch,), schedule.seed)
            y = targets[torch.from_numpy(idx)]
            optimizer.zero_grad()
            loss = loss_fn(model(x), y)
            loss.backward()
            optimizer.step()
            total += float(loss.item()) * len(idx)
            seen += len(idx)
        scheduler.step()
        train_loss = total / max(seen, 1)

        preds = predict_states(model, dataset, val_idx, batch_size=schedule.batch_size)
        val_mae_f, val_mae_o = mae_face(preds, val_truth)
        val_loss = float(
            np.mean(np.abs(normalize_states(preds) - normalize_states(val_truth)))
        )
        history.append(
            {
                "epoch": epoch + 1,
                "train_loss": train_loss,
                "val_loss": val_loss,
                "val_mae_f": float(val_mae_f),
                "val_mae_o": float(val_mae_o),
            }
        )
        if val_loss < best_loss:
            best_loss = val_loss
            best_state = copy.deepcopy(model.state_dict())

    model.load_state_dict(best_state)
    return model, history
