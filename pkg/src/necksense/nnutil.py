"""Small torch helpers shared by the reconstruction and detection stacks."""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np
import torch
from torch import nn


def state_fingerprint(obj: nn.Module | dict) -> str:
    """sha256 over all parameters and buffers, order-independent input.

    Identical weights give identical fingerprints across processes, which
    is what lets tests assert that frozen layers stayed untouched.
    """
    state = obj.state_dict() if isinstance(obj, nn.Module) else obj
    h = hashlib.sha256()
    for name in sorted(state):
        h.update(name.encode())
        tensor = state[name]
        if isinstance(tensor, torch.Tensor):
            arr = tensor.detach().cpu().contiguous().numpy()
            h.update(str(arr.dtype).encode())
            h.update(np.ascontiguousarray(arr).tobytes())
        else:
            h.update(repr(tensor).encode())
    return h.hexdigest()


def atomic_torch_save(obj, path: str | Path) -> Path:
    """torch.save through a temp file + rename; no partial checkpoints."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    torch.save(obj, tmp)
    tmp.replace(path)
    return path
