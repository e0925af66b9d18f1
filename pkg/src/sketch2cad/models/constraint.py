"""Primitive-set-to-constraint-set model.

Input primitives are embedded by averaging type / flag / per-slot value
embeddings, encoded, and decoded against learned constraint queries. The
type head classifies over the constraint vocabulary; the parameter path is
a pointer: each query emits two slot features whose scaled dot products
with the encoded primitives give distributions over primitive indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import torch
import torch.nn.functional as F
from torch import nn

from ..core import (
    CONSTRAINT_ARITY,
    CONSTRAINT_TYPE_INDEX,
    SYMMETRIC_CONSTRAINTS,
    Constraint,
    ConstraintType,
    Primitive,
    PRIMITIVE_TYPE_INDEX,
    dequantize,
)
from ..errors import CapacityError, ConfigError
from ..matching import constraint_cost_matrix, hungarian
from ..predictions import ConstraintPredictionSet, N_CONSTRAINT_CLASSES, N_PARAM_BINS

_NONE_IDX = CONSTRAINT_TYPE_INDEX[ConstraintType.NONE]

PARAM_ENCODINGS = ("embedding_6bit", "sincos_float", "mlp_float")


@dataclass
class ConstraintModelConfig:
    d_model: int = 256
    encoder_layers: int = 12
    decoder_layers: int = 12
    heads: int = 8
    ff_dim: int = 512
    n_queries: int = 40
    loss_weights: tuple[float, float] = (1.0, 1.0)
    use_pointer: bool = True
    param_encoding: str = "embedding_6bit"
    no_object_weight: float = 0.1
    max_primitives: int = 64

    def __post_init__(self):
        self.loss_weights = tuple(self.loss_weights)
        if self.d_model % self.heads:
            raise ConfigError("d_model must be divisible by heads")
        if any(w <= 0 for w in self.loss_weights):
            raise ConfigError("loss weights must be positive")
        if self.param_encoding not in PARAM_ENCODINGS:
            raise ConfigError(f"unknown param_encoding {self.param_encoding!r}")


def pointer(slot_features: torch.Tensor, f_p: torch.Tensor, pad_mask: torch.Tensor | None = None) -> torch.Tensor:
    """Scaled dot-product pointer: log-distributions over input primitives.

    slot_features (..., S, d) against f_p (..., K, d) -> (..., S, K); True
    entries of pad_mask (..., K) are excluded from the softmax.
    """
    d = slot_features.shape[-1]
    if slot_features.dim() == f_p.dim() + 1:
        f_p = f_p.unsqueeze(-3)  # broadcast primitives over the query axis
    logits = torch.matmul(slot_features, f_p.transpose(-1, -2)) / math.sqrt(d)
    if pad_mask is not None:
        while pad_mask.dim() < logits.dim():
            pad_mask = pad_mask.unsqueeze(-2)
        logits = logits.masked_fill(pad_mask, float("-inf"))
    return F.log_softmax(logits, dim=-1)


def _sincos_table(d_model: int) -> torch.Tensor:
    """(levels, d) fixed sinusoidal features of the quantized value."""
    pos = torch.arange(N_PARAM_BINS, dtype=torch.float32).unsqueeze(1)
    i = torch.arange(d_model // 2, dtype=torch.float32)
    freq = torch.exp(-math.log(10000.0) * 2.0 * i / d_model)
    ang = pos * freq
    table = torch.zeros(N_PARAM_BINS, d_model)
    table[:, 0::2] = torch.sin(ang)
    table[:, 1::2] = torch.cos(ang)
    return table


class ConstraintNet(nn.Module):
    def __init__(self, cfg: ConstraintModelConfig):
        super().__init__()
        self.cfg = cfg
        d = cfg.d_model
        self.type_embed = nn.Embedding(5, d)
        self.flag_embed = nn.Embedding(2, d)
        if cfg.param_encoding == "embedding_6bit":
            self.param_embed = nn.Embedding(7 * N_PARAM_BINS, d)
        elif cfg.param_encoding == "sincos_float":
            self.register_buffer("sincos", _sincos_table(d))
        else:
            self.param_mlp = nn.Sequential(nn.Linear(1, d), nn.ReLU(), nn.Linear(d, d))
        self.pos_enc = nn.Parameter(torch.randn(cfg.max_primitives, d) * 0.02)
        self.queries = nn.Parameter(torch.randn(cfg.n_queries, d) * 0.02)
        self.query_pos = nn.Parameter(torch.randn(cfg.n_queries, d) * 0.02)
        enc_layer = nn.TransformerEncoderLayer(d, cfg.heads, cfg.ff_dim, dropout=0.0, batch_first=True, norm_first=True)
        self.encoder = nn.TransformerEncoder(enc_layer, cfg.encoder_layers, enable_nested_tensor=False)
        dec_layer = nn.TransformerDecoderLayer(d, cfg.heads, cfg.ff_dim, dropout=0.0, batch_first=True, norm_first=True)
        self.decoder = nn.TransformerDecoder(dec_layer, cfg.decoder_layers)
        self.type_head = nn.Linear(d, N_CONSTRAINT_CLASSES)
        self.slot_proj = nn.Sequential(nn.Linear(d, d), nn.ReLU(), nn.Linear(d, 2 * d))
        if not cfg.use_pointer:
            self.index_head = nn.Linear(d, 2 * cfg.max_primitives)

    # -- embeddings ----------------------------------------------------------

    def _param_vector(self, slot: int, value: int) -> torch.Tensor:
        if self.cfg.param_encoding == "embedding_6bit":
            return self.param_embed.weight[slot * N_PARAM_BINS + value]
        if self.cfg.param_encoding == "sincos_float":
            return self.sincos[value]
        return self.param_mlp(torch.tensor([dequantize(value)], dtype=torch.float32))

    def embed_primitive(self, p: Primitive) -> torch.Tensor:
        """Mean of type, flag and live-slot value embeddings (padding skipped)."""
        parts = [
            self.type_embed.weight[PRIMITIVE_TYPE_INDEX[p.ptype]],
            self.flag_embed.weight[int(p.flag)],
        ]
        for s in p.live_slots:
            parts.append(self._param_vector(s, p.params[s]))
        return torch.stack(parts).sum(dim=0) / len(parts)

    def _embed_batch(self, batch: list[list[Primitive]]) -> tuple[torch.Tensor, torch.Tensor]:
        """Padded embeddings (B, Kmax, d) and pad mask (B, Kmax), True = pad."""
        k_max = max(len(prims) for prims in batch)
        if k_max > self.cfg.max_primitives:
            raise CapacityError(f"{k_max} primitives exceed max_primitives={self.cfg.max_primitives}")
        d = self.cfg.d_model
        emb = torch.zeros(len(batch), k_max, d)
        pad = torch.ones(len(batch), k_max, dtype=torch.bool)
        for b, prims in enumerate(batch):
            for k, p in enumerate(prims):
                emb[b, k] = self.embed_primitive(p)
                pad[b, k] = False
        return emb, pad

    def encode_primitives(self, prims: list[Primitive], use_pos: bool = True) -> torch.Tensor:
        """(K_p, d) encoder features for one primitive list."""
        if not prims:
            raise ConfigError("cannot encode an empty primitive list")
        emb, pad = self._embed_batch([prims])
        if use_pos:
            emb = emb + self.pos_enc[: emb.shape[1]]
        return self.encoder(emb, src_key_padding_mask=pad)[0]

    # -- forward --------------------------------------------------------------

    def forward(self, batch: list[list[Primitive]], use_pos: bool = True) -> "ConstraintOutputs":
        if any(not prims for prims in batch):
            raise ConfigError("cannot run on an empty primitive list")
        emb, pad = self._embed_batch(batch)
        if use_pos:
            emb = emb + self.pos_enc[: emb.shape[1]]
        memory = self.encoder(emb, src_key_padding_mask=pad)
        q = (self.queries + self.query_pos).unsqueeze(0).expand(len(batch), -1, -1)
        feats = self.decoder(q, memory, memory_key_padding_mask=pad)
        type_logits = self.type_head(feats)
        n_c, d = self.cfg.n_queries, self.cfg.d_model
        if self.cfg.use_pointer:
            slots = self.slot_proj(feats).reshape(len(batch), n_c, 2, d)
            pointer_logp = pointer(slots, memory, pad_mask=pad)
        else:
            k_max = emb.shape[1]
            logits = self.index_head(feats).reshape(len(batch), n_c, 2, self.cfg.max_primitives)
            logits = logits[..., :k_max].masked_fill(pad.unsqueeze(1).unsqueeze(2), float("-inf"))
            pointer_logp = F.log_softmax(logits, dim=-1)
        return ConstraintOutputs(type_logits, pointer_logp, [len(p) for p in batch])


@dataclass
class ConstraintOutputs:
    type_logits: torch.Tensor  # (B, N_c, 9)
    pointer_logp: torch.Tensor  # (B, N_c, 2, Kmax), log-normalized over valid K_p
    k_p: list[int]

    def prediction_set(self, i: int) -> ConstraintPredictionSet:
        type_logp = F.log_softmax(self.type_logits[i], dim=-1).detach().numpy()
        ptr = self.pointer_logp[i, :, :, : self.k_p[i]].detach().numpy()
        return ConstraintPredictionSet(type_logp, ptr)


@dataclass
class ConstraintSampleOutputs:
    type_logits: torch.Tensor  # (N_c, 9)
    pointer_logp: torch.Tensor  # (N_c, 2, K_p)


def _sample(outs: ConstraintOutputs, i: int) -> ConstraintSampleOutputs:
    return ConstraintSampleOutputs(outs.type_logits[i], outs.pointer_logp[i, :, :, : outs.k_p[i]])


def constraint_loss(
    gt: list[Constraint], out: ConstraintSampleOutputs, cfg: ConstraintModelConfig
) -> tuple[torch.Tensor, dict[str, float]]:
    """Matched set loss for one constraint list.

    The pointer term averages over the type's arity slots and takes the
    better of both orderings for symmetric pair types, mirroring the cost
    matrix used for matching.
    """
    n_q = out.type_logits.shape[0]
    if len(gt) > n_q:
        raise CapacityError(f"{len(gt)} constraints exceed {n_q} queries")
    w_type, w_param = cfg.loss_weights

    type_logp = F.log_softmax(out.type_logits, dim=-1)
    ptr_logp = out.pointer_logp

    pred_np = ConstraintPredictionSet(type_logp.detach().numpy(), ptr_logp.detach().numpy())
    sigma = hungarian(constraint_cost_matrix(gt, pred_np, cfg.loss_weights)) if gt else None

    zero = out.type_logits.sum() * 0.0
    loss_t, loss_p = zero.clone(), zero.clone()
    matched: set[int] = set()
    for i, c in enumerate(gt):
        j = sigma[i]
        matched.add(j)
        loss_t = loss_t - type_logp[j, CONSTRAINT_TYPE_INDEX[c.ctype]]
        arity = CONSTRAINT_ARITY[c.ctype]
        if arity == 1:
            loss_p = loss_p - ptr_logp[j, 0, c.refs[0]]
        else:
            a, b = c.refs
            direct = -(ptr_logp[j, 0, a] + ptr_logp[j, 1, b]) / 2.0
            if c.ctype in SYMMETRIC_CONSTRAINTS:
                swapped = -(ptr_logp[j, 0, b] + ptr_logp[j, 1, a]) / 2.0
                loss_p = loss_p + torch.minimum(direct, swapped)
            else:
                loss_p = loss_p + direct
    loss_none = zero.clone()
    for j in range(n_q):
        if j not in matched:
            loss_none = loss_none - type_logp[j, _NONE_IDX]
    total = w_type * loss_t + w_param * loss_p + cfg.no_object_weight * loss_none
    components = {
        "type": float(loss_t.detach()),
        "param": float(loss_p.detach()),
        "no_object": float(cfg.no_object_weight * loss_none.detach()),
        "total": float(total.detach()),
    }
    return total, components


def constraint_batch_loss(
    outs: ConstraintOutputs, gts: list[list[Constraint]], cfg: ConstraintModelConfig
) -> tuple[torch.Tensor, dict[str, float]]:
    totals, comps = [], []
    for i, gt in enumerate(gts):
        t, c = constraint_loss(gt, _sample(outs, i), cfg)
        totals.append(t)
        comps.append(c)
    total = torch.stack(totals).mean()
    mean_comps = {k: float(np.mean([c[k] for c in comps])) for k in comps[0]}
    return total, mean_comps
