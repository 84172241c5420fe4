"""Residual encoder + linear decoder for tile -> face-state regression."""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn

from ..errors import InvalidArgumentError
from ..imaging import ImagingConfig
from ..registry import STATE_DIM
from ..seeding import seed_for

DEPTH_BLOCKS = {18: (2, 2, 2, 2), 34: (3, 4, 6, 3)}


@dataclass(frozen=True)
class FacemapConfig:
    """Architecture + input geometry; everything the weights depend on."""

    depth: int = 18
    width_mult: float = 1.0
    decoder_hidden: int = 256
    output_dim: int = STATE_DIM
    half_width: int = 320
    half_height: int = 240
    seed: int = 0

    def __post_init__(self):
        if self.depth not in DEPTH_BLOCKS:
            raise InvalidArgumentError(
                f"depth must be one of {sorted(DEPTH_BLOCKS)}, got {self.depth}"
            )
        if self.width_mult <= 0:
            raise InvalidArgumentError("width_mult must be positive")
        if self.output_dim != STATE_DIM:
            raise InvalidArgumentError(
                f"face state has {STATE_DIM} values; output_dim {self.output_dim} "
                "does not match"
            )
        if min(self.half_width, self.half_height) < 8:
            raise InvalidArgumentError("tile halves must be at least 8 px")

    @property
    def imaging(self) -> ImagingConfig:
        return ImagingConfig(half_width=self.half_width, half_height=self.half_height)

    def widths(self) -> tuple[int, int, int, int]:
        return tuple(max(8, int(round(c * self.width_mult))) for c in (64, 128, 256, 512))

    def scaled(self, factor: float) -> "FacemapConfig":
        img = self.imaging.scaled(factor)
        return FacemapConfig(
            depth=self.depth,
            width_mult=self.width_mult,
            decoder_hidden=self.decoder_hidden,
            output_dim=self.output_dim,
            half_width=img.half_width,
            half_height=img.half_height,
            seed=self.seed,
        )


class BasicBlock(nn.Module):
    def __init__(self, in_ch: int, out_ch: int, stride: int = 1):
        super().__init__()
        self.conv1 = nn.Conv2d(in_ch, out_ch, 3, stride=stride, padding=1, bias=False)
        self.bn1 = nn.BatchNorm2d(out_ch)
        self.conv2 = nn.Conv2d(out_ch, out_ch, 3, stride=1, padding=1, bias=False)
        self.bn2 = nn.BatchNorm2d(out_ch)
        self.relu = nn.ReLU(inplace=True)
        if stride != 1 or in_ch != out_ch:
            self.shortcut = nn.Sequential(
                nn.Conv2d(in_ch, out_ch, 1, stride=stride, bias=False),
                nn.BatchNorm2d(out_ch),
            )
        else:
            self.shortcut = nn.Identity()

    def forward(self, x):
        out = self.relu(self.bn1(self.conv1(x)))
        out = self.bn2(self.conv2(out))
        return self.relu(out + self.shortcut(x))


class FacemapModel(nn.Module):
    """(B, 1, H, 2W) tile -> (B, 55) normalized face state."""

    def __init__(self, config: FacemapConfig):
        super().__init__()
        self.config = config
        w1, w2, w3, w4 = config.widths()
        blocks = DEPTH_BLOCKS[config.depth]

        self.stem = nn.Sequential(
            nn.Conv2d(1, w1, 7, stride=2, padding=3, bias=False),
            nn.BatchNorm2d(w1),
            nn.ReLU(inplace=True),
            nn.MaxPool2d(3, stride=2, padding=1),
        )
        self.layers = nn.Sequential(
            self._stage(w1, w1, blocks[0], stride=1),
            self._stage(w1, w2, blocks[1], stride=2),
            self._stage(w2, w3, blocks[2], stride=2),
            self._stage(w3, w4, blocks[3], stride=2),
        )
        self.pool = nn.AdaptiveAvgPool2d(1)
        self.decoder = nn.Sequential(
            nn.Linear(w4, config.decoder_hidden),
            nn.ReLU(inplace=True),
            nn.Linear(config.decoder_hidden, config.output_dim),
        )

    @staticmethod
    def _stage(in_ch: int, out_ch: int, n_blocks: int, stride: int) -> nn.Sequential:
        mods = [BasicBlock(in_ch, out_ch, stride=stride)]
        mods.extend(BasicBlock(out_ch, out_ch) for _ in range(n_blocks - 1))
        return nn.Sequential(*mods)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.ndim != 4 or x.shape[1] != 1:
            raise InvalidArgumentError(f"expected (B, 1, H, W) input, got {tuple(x.shape)}")
        z = self.pool(self.layers(self.stem(x))).flatten(1)
        return self.decoder(z)


def build_facemap(config: FacemapConfig | None = None) -> FacemapModel:
    """Deterministic construction: same config -> same initial weights."""
    config = config or FacemapConfig()
    torch.manual_seed(seed_for(config.seed, "facemap-init", config.depth, config.width_mult))
    return FacemapModel(config)


def param_count(model: nn.Module) -> int:
    return sum(p.numel() for p in model.parameters())
