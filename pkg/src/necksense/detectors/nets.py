"""Window classifier architectures.

Every module takes (B, F, L) float tensors and returns (B, n_classes)
logits. The recurrent+convolutional hybrid is the reference detector:
its convolutional branch is Conv(F->128,k7) -> Conv(128->256,k5) ->
Conv(256->128,k3), all bias-free with batch norm, globally average
pooled, concatenated with the last hidden state of a GRU over the raw
window, then classified through a dropout + linear head.
"""

from __future__ import annotations

import torch
from torch import nn


class GRUFCN(nn.Module):
    def __init__(
        self,
        feature_dim: int,
        n_classes: int = 2,
        hidden: int = 100,
        dropout: float = 0.8,
        dropout_fc: float = 0.3,
    ):
        super().__init__()
        self.gru = nn.GRU(feature_dim, hidden, batch_first=True)
        self.dropout_gru = nn.Dropout(dropout)
        self.conv = nn.Sequential(
            nn.Conv1d(feature_dim, 128, 7, padding=3, bias=False),
            nn.BatchNorm1d(128),
            nn.ReLU(inplace=True),
            nn.Conv1d(128, 256, 5, padding=2, bias=False),
            nn.BatchNorm1d(256),
            nn.ReLU(inplace=True),
            nn.Conv1d(256, 128, 3, padding=1, bias=False),
            nn.BatchNorm1d(128),
            nn.ReLU(inplace=True),
        )
        self.dropout_fc = nn.Dropout(dropout_fc)
        self.head = nn.Linear(128 + hidden, n_classes)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        conv_feat = self.conv(x).mean(dim=2)
        _, h_n = self.gru(x.transpose(1, 2))
        gru_feat = self.dropout_gru(h_n[-1])
        return self.head(self.dropout_fc(torch.cat([conv_feat, gru_feat], dim=1)))


class MLDNN(nn.Module):
    """Flattened-window MLP with the fixed 64/128/64 hidden ladder."""

    def __init__(self, feature_dim: int, interval_len: int, n_classes: int = 2):
        super().__init__()
        self.net = nn.Sequential(
            nn.Flatten(),
            nn.Linear(feature_dim * interval_len, 64),
            nn.ReLU(inplace=True),
            nn.Linear(64, 128),
            nn.ReLU(inplace=True),
            nn.Linear(128, 64),
            nn.ReLU(inplace=True),
            nn.Linear(64, n_classes),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.net(x)


class LSTMNet(nn.Module):
    def __init__(
        self,
        feature_dim: int,
        n_classes: int = 2,
        hidden: int = 100,
        dropout: float = 0.3,
        bidirectional: bool = False,
    ):
        super().__init__()
        self.lstm = nn.LSTM(
            feature_dim, hidden, batch_first=True, bidirectional=bidirectional
        )
        self.dropout = nn.Dropout(dropout)
        self.head = nn.Linear(hidden * (2 if bidirectional else 1), n_classes)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        _, (h_n, _) = self.lstm(x.transpose(1, 2))
        if self.lstm.bidirectional:
            feat = torch.cat([h_n[-2], h_n[-1]], dim=1)
        else:
            feat = h_n[-1]
        return self.head(self.dropout(feat))


class _SpatialGatingUnit(nn.Module):
    def __init__(self, d_ffn: int, seq_len: int):
        super().__init__()
        self.norm = nn.LayerNorm(d_ffn // 2)
        self.proj = nn.Linear(seq_len, seq_len)
        nn.init.zeros_(self.proj.weight)
        nn.init.ones_(self.proj.bias)  # near-identity gate at start

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        u, v = x.chunk(2, dim=-1)
        v = self.norm(v)
        v = self.proj(v.transpose(1, 2)).transpose(1, 2)
        return u * v


class _GMLPBlock(nn.Module):
    def __init__(self, d_model: int, d_ffn: int, seq_len: int):
        super().__init__()
        self.norm = nn.LayerNorm(d_model)
        self.proj_in = nn.Linear(d_model, d_ffn)
        self.sgu = _SpatialGatingUnit(d_ffn, seq_len)
        self.proj_out = nn.Linear(d_ffn // 2, d_model)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        y = self.proj_in(self.norm(x))
        y = nn.functional.gelu(y)
        y = self.sgu(y)
        return x + self.proj_out(y)


class GMLP(nn.Module):
    """Gated-MLP stack: token mixing along the time axis via the gate."""

    def __init__(
        self,
        feature_dim: int,
        interval_len: int,
        n_classes: int = 2,
        d_model: int = 64,
        d_ffn: int = 128,
        depth: int = 2,
    ):
        super().__init__()
        self.embed = nn.Linear(feature_dim, d_model)
        self.blocks = nn.Sequential(
            *(_GMLPBlock(d_model, d_ffn, interval_len) for _ in range(depth))
        )
        self.head = nn.Linear(d_model, n_classes)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        z = self.blocks(self.embed(x.transpose(1, 2)))
        return self.head(z.mean(dim=1))


class _InceptionBlock(nn.Module):
    def __init__(self, in_ch: int, nf: int = 32):
        super().__init__()
        self.bottleneck = (
            nn.Conv1d(in_ch, nf, 1, bias=False) if in_ch > nf else nn.Identity()
        )
        mid = nf if in_ch > nf else in_ch
        self.convs = nn.ModuleList(
            nn.Conv1d(mid, nf, k, padding=k // 2, bias=False) for k in (39, 19, 9)
        )
        self.pool_conv = nn.Sequential(
            nn.MaxPool1d(3, stride=1, padding=1), nn.Conv1d(in_ch, nf, 1, bias=False)
        )
        self.bn = nn.BatchNorm1d(nf * 4)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        z = self.bottleneck(x)
        out = torch.cat([conv(z) for conv in self.convs] + [self.pool_conv(x)], dim=1)
        return nn.functional.relu(self.bn(out))


class InceptionTime(nn.Module):
    def __init__(
        self, feature_dim: int, n_classes: int = 2, nf: int = 32, depth: int = 6
    ):
        super().__init__()
        self.blocks = nn.ModuleList()
        self.shortcuts = nn.ModuleList()
        ch = feature_dim
        for d in range(depth):
            self.blocks.append(_InceptionBlock(ch, nf))
            ch = nf * 4
            if d % 3 == 2:
                in_res = feature_dim if d == 2 else nf * 4
                self.shortcuts.append(
                    nn.Sequential(
                        nn.Conv1d(in_res, ch, 1, bias=False), nn.BatchNorm1d(ch)
                    )
                )
        self.head = nn.Linear(ch, n_classes)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        res = x
        z = x
        s = 0
        for d, block in enumerate(self.blocks):
            z = block(z)
            if d % 3 == 2:
                z = nn.functional.relu(z + self.shortcuts[s](res))
                res = z
                s += 1
        return self.head(z.mean(dim=2))


class TransformerNet(nn.Module):
    def __init__(
        self,
        feature_dim: int,
        interval_len: int,
        n_classes: int = 2,
        d_model: int = 64,
        nhead: int = 4,
        depth: int = 2,
    ):
        super().__init__()
        self.embed = nn.Linear(feature_dim, d_model)
        self.pos = nn.Parameter(torch.zeros(1, interval_len, d_model))
        layer = nn.TransformerEncoderLayer(
            d_model,
            nhead,
            dim_feedforward=2 * d_model,
            dropout=0.1,
            batch_first=True,
            norm_first=True,
        )
        self.encoder = nn.TransformerEncoder(layer, depth, enable_nested_tensor=False)
        self.head = nn.Linear(d_model, n_classes)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        z = self.embed(x.transpose(1, 2)) + self.pos[:, : x.shape[2]]
        return self.head(self.encoder(z).mean(dim=1))
