"""Image-to-primitive-set model: patch tokens, transformer encoder/decoder
with learned queries, and three prediction heads over type / flag /
parameters, trained with a Hungarian-matched set loss.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
import torch.nn.functional as F
from torch import nn

from ..core import LIVE_SLOTS, PRIMITIVE_TYPE_INDEX, Primitive, PrimitiveType, dequantize
from ..errors import CapacityError, ConfigError
from ..matching import hungarian, primitive_cost_matrix
from ..predictions import N_PARAM_BINS, N_PRIMITIVE_CLASSES, PrimitivePredictionSet

_NONE_IDX = PRIMITIVE_TYPE_INDEX[PrimitiveType.NONE]


@dataclass
class PrimitiveModelConfig:
    image_size: int = 128
    patch_h: int = 16
    patch_w: int = 16
    d_model: int = 256
    encoder_layers: int = 12
    decoder_layers: int = 12
    heads: int = 8
    ff_dim: int = 512
    n_queries: int = 20
    loss_weights: tuple[float, float, float] = (1.0, 1.0, 5.0)
    no_object_weight: float = 0.1
    param_head_mode: str = "classification"  # or "regression"

    def __post_init__(self):
        self.loss_weights = tuple(self.loss_weights)
        if self.image_size % self.patch_h or self.image_size % self.patch_w:
            raise ConfigError("image_size must be divisible by the patch dims")
        if self.d_model % self.heads:
            raise ConfigError("d_model must be divisible by heads")
        if any(w <= 0 for w in self.loss_weights):
            raise ConfigError("loss weights must be positive")
        if self.param_head_mode not in ("classification", "regression"):
            raise ConfigError(f"unknown param_head_mode {self.param_head_mode!r}")

    @property
    def n_patches(self) -> int:
        return (self.image_size // self.patch_h) * (self.image_size // self.patch_w)


def extract_patches(images: torch.Tensor, patch_h: int, patch_w: int) -> torch.Tensor:
    """(B, H, W) -> (B, K, patch_h*patch_w) flattened patches, row-major."""
    b, h, w = images.shape
    gh, gw = h // patch_h, w // patch_w
    x = images.reshape(b, gh, patch_h, gw, patch_w)
    x = x.permute(0, 1, 3, 2, 4)  # (B, gh, gw, ph, pw)
    return x.reshape(b, gh * gw, patch_h * patch_w)


@dataclass
class PrimitiveOutputs:
    """Raw head outputs for a batch; param_values only in regression mode."""

    type_logits: torch.Tensor  # (B, N_p, 5)
    flag_logits: torch.Tensor  # (B, N_p, 2)
    param_logits: torch.Tensor | None = None  # (B, N_p, 7, 64)
    param_values: torch.Tensor | None = None  # (B, N_p, 7) in [0, 1]

    def prediction_set(self, i: int) -> PrimitivePredictionSet:
        """Detached numpy view of sample i, log-normalized."""
        type_logp = F.log_softmax(self.type_logits[i], dim=-1).detach().numpy()
        flag_logp = F.log_softmax(self.flag_logits[i], dim=-1).detach().numpy()
        if self.param_logits is not None:
            return PrimitivePredictionSet(
                type_logp, flag_logp, param_logp=F.log_softmax(self.param_logits[i], dim=-1).detach().numpy()
            )
        return PrimitivePredictionSet(
            type_logp, flag_logp, param_value=self.param_values[i].detach().numpy()
        )


class PrimitiveNet(nn.Module):
    def __init__(self, cfg: PrimitiveModelConfig):
        super().__init__()
        self.cfg = cfg
        d = cfg.d_model
        self.patch_proj = nn.Linear(cfg.patch_h * cfg.patch_w, d)
        self.pos_enc = nn.Parameter(torch.randn(cfg.n_patches, d) * 0.02)
        self.queries = nn.Parameter(torch.randn(cfg.n_queries, d) * 0.02)
        self.query_pos = nn.Parameter(torch.randn(cfg.n_queries, d) * 0.02)
        enc_layer = nn.TransformerEncoderLayer(
            d, cfg.heads, cfg.ff_dim, dropout=0.0, batch_first=True, norm_first=True
        )
        self.encoder = nn.TransformerEncoder(enc_layer, cfg.encoder_layers, enable_nested_tensor=False)
        dec_layer = nn.TransformerDecoderLayer(
            d, cfg.heads, cfg.ff_dim, dropout=0.0, batch_first=True, norm_first=True
        )
        self.decoder = nn.TransformerDecoder(dec_layer, cfg.decoder_layers)
        self.type_head = nn.Linear(d, N_PRIMITIVE_CLASSES)
        self.flag_head = nn.Linear(d, 2)
        self.param_trunk = nn.Sequential(nn.Linear(d, d), nn.ReLU())
        if cfg.param_head_mode == "classification":
            self.param_head = nn.Linear(d, 7 * N_PARAM_BINS)
        else:
            self.param_head = nn.Linear(d, 7)

    def patchify(self, images: torch.Tensor) -> torch.Tensor:
        """Projected patch tokens with positional encodings, (B, K, d)."""
        if images.shape[-2:] != (self.cfg.image_size, self.cfg.image_size):
            raise ConfigError(f"expected {self.cfg.image_size}px images, got {tuple(images.shape[-2:])}")
        tokens = extract_patches(images, self.cfg.patch_h, self.cfg.patch_w)
        return self.patch_proj(tokens) + self.pos_enc

    def forward(self, images: torch.Tensor) -> PrimitiveOutputs:
        b = images.shape[0]
        memory = self.encoder(self.patchify(images))
        q = (self.queries + self.query_pos).unsqueeze(0).expand(b, -1, -1)
        feats = self.decoder(q, memory)
        trunk = self.param_trunk(feats)
        if self.cfg.param_head_mode == "classification":
            param_logits = self.param_head(trunk).reshape(b, self.cfg.n_queries, 7, N_PARAM_BINS)
            return PrimitiveOutputs(self.type_head(feats), self.flag_head(feats), param_logits=param_logits)
        param_values = torch.sigmoid(self.param_head(trunk))
        return PrimitiveOutputs(self.type_head(feats), self.flag_head(feats), param_values=param_values)


@dataclass
class SampleOutputs:
    """One sample's head outputs, for per-sketch loss computation."""

    type_logits: torch.Tensor  # (N_p, 5)
    flag_logits: torch.Tensor  # (N_p, 2)
    param_logits: torch.Tensor | None = None
    param_values: torch.Tensor | None = None


def _sample(outs: PrimitiveOutputs, i: int) -> SampleOutputs:
    return SampleOutputs(
        outs.type_logits[i],
        outs.flag_logits[i],
        None if outs.param_logits is None else outs.param_logits[i],
        None if outs.param_values is None else outs.param_values[i],
    )


def primitive_loss(
    gt: list[Primitive], out: SampleOutputs, cfg: PrimitiveModelConfig
) -> tuple[torch.Tensor, dict[str, float]]:
    """Matched set loss for one sketch (sums over matched pairs).

    Matching runs on detached costs; unmatched queries are pushed toward the
    no-object class with a small weight so decoding stays well-defined.
    """
    n_q = out.type_logits.shape[0]
    if len(gt) > n_q:
        raise CapacityError(f"{len(gt)} primitives exceed {n_q} queries")
    w_type, w_flag, w_param = cfg.loss_weights

    type_logp = F.log_softmax(out.type_logits, dim=-1)
    flag_logp = F.log_softmax(out.flag_logits, dim=-1)
    param_logp = None if out.param_logits is None else F.log_softmax(out.param_logits, dim=-1)

    pred_np = PrimitivePredictionSet(
        type_logp.detach().numpy(),
        flag_logp.detach().numpy(),
        param_logp=None if param_logp is None else param_logp.detach().numpy(),
        param_value=None if out.param_values is None else out.param_values.detach().numpy(),
    )
    sigma = hungarian(primitive_cost_matrix(gt, pred_np, cfg.loss_weights)) if gt else None

    zero = out.type_logits.sum() * 0.0
    loss_t, loss_f, loss_p = zero.clone(), zero.clone(), zero.clone()
    matched: set[int] = set()
    for i, p in enumerate(gt):
        j = sigma[i]
        matched.add(j)
        loss_t = loss_t - type_logp[j, PRIMITIVE_TYPE_INDEX[p.ptype]]
        loss_f = loss_f - flag_logp[j, int(p.flag)]
        live = list(LIVE_SLOTS[p.ptype])
        if param_logp is not None:
            slot_ce = torch.stack([-param_logp[j, s, p.params[s]] for s in live])
            loss_p = loss_p + slot_ce.mean()
        else:
            target = torch.tensor([dequantize(p.params[s]) for s in live], dtype=out.param_values.dtype)
            loss_p = loss_p + ((out.param_values[j, live] - target) ** 2).mean()

    loss_none = zero.clone()
    for j in range(n_q):
        if j not in matched:
            loss_none = loss_none - type_logp[j, _NONE_IDX]
    total = w_type * loss_t + w_flag * loss_f + w_param * loss_p + cfg.no_object_weight * loss_none
    components = {
        "type": float(loss_t.detach()),
        "flag": float(loss_f.detach()),
        "param": float(loss_p.detach()),
        "no_object": float(cfg.no_object_weight * loss_none.detach()),
        "total": float(total.detach()),
    }
    return total, components


def primitive_batch_loss(
    outs: PrimitiveOutputs, gts: list[list[Primitive]], cfg: PrimitiveModelConfig
) -> tuple[torch.Tensor, dict[str, float]]:
    totals, comps = [], []
    for i, gt in enumerate(gts):
        t, c = primitive_loss(gt, _sample(outs, i), cfg)
        totals.append(t)
        comps.append(c)
    total = torch.stack(totals).mean()
    mean_comps = {k: float(np.mean([c[k] for c in comps])) for k in comps[0]}
    return total, mean_comps
