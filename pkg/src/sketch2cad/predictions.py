"""Per-query prediction sets produced by the two models, plus decode rules.

Both sets hold log-distributions as numpy arrays so that matching, metrics
and decoding stay framework-agnostic; the torch models emit these via
detached copies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    CONSTRAINT_ARITY,
    CONSTRAINT_TYPES,
    CONSTRAINT_TYPE_INDEX,
    GRID,
    LIVE_SLOTS,
    N_PARAM_SLOTS,
    PRIMITIVE_TYPES,
    PRIMITIVE_TYPE_INDEX,
    Constraint,
    ConstraintType,
    Primitive,
    PrimitiveType,
    canonicalize_constraint,
    dequantize,
    quantize,
)

N_PRIMITIVE_CLASSES = len(PRIMITIVE_TYPES)  # 4 + no-object
N_CONSTRAINT_CLASSES = len(CONSTRAINT_TYPES)  # 8 + no-object
N_PARAM_BINS = GRID.levels


@dataclass
class PrimitivePredictionSet:
    """One sketch worth of primitive-set predictions.

    param_logp is set in classification mode, param_value (dequantized
    reals) in regression mode; exactly one of the two is present.
    """

    type_logp: np.ndarray  # (N_p, 5)
    flag_logp: np.ndarray  # (N_p, 2)
    param_logp: np.ndarray | None = None  # (N_p, 7, 64)
    param_value: np.ndarray | None = None  # (N_p, 7)

    @property
    def n_queries(self) -> int:
        return self.type_logp.shape[0]


@dataclass
class ConstraintPredictionSet:
    """One sketch worth of constraint-set predictions.

    Pointer distributions range over the K_p input primitives.
    """

    type_logp: np.ndarray  # (N_c, 9)
    pointer_logp: np.ndarray  # (N_c, 2, K_p)

    @property
    def n_queries(self) -> int:
        return self.type_logp.shape[0]

    @property
    def n_primitives(self) -> int:
        return self.pointer_logp.shape[2]


def _soft_onehot_log(n: int, hot: int, eps: float) -> np.ndarray:
    p = np.full(n, eps / (n - 1) if n > 1 else 0.0)
    p[hot] = 1.0 - eps if n > 1 else 1.0
    return np.log(p) if n > 1 else np.zeros(1)


def one_hot_primitive_predictions(
    prims: list[Primitive], n_queries: int, eps: float = 1e-9
) -> PrimitivePredictionSet:
    """Encode primitives as near-one-hot predictions on the first queries.

    Surplus queries are hot on the no-object class. eps keeps every
    cross-entropy finite so cost matrices stay well-formed.
    """
    if len(prims) > n_queries:
        raise ValueError(f"{len(prims)} primitives exceed {n_queries} queries")
    type_logp = np.empty((n_queries, N_PRIMITIVE_CLASSES))
    flag_logp = np.empty((n_queries, 2))
    param_logp = np.empty((n_queries, N_PARAM_SLOTS, N_PARAM_BINS))
    none_idx = PRIMITIVE_TYPE_INDEX[PrimitiveType.NONE]
    for j in range(n_queries):
        if j < len(prims):
            p = prims[j]
            type_logp[j] = _soft_onehot_log(N_PRIMITIVE_CLASSES, PRIMITIVE_TYPE_INDEX[p.ptype], eps)
            flag_logp[j] = _soft_onehot_log(2, int(p.flag), eps)
            for s in range(N_PARAM_SLOTS):
                param_logp[j, s] = _soft_onehot_log(N_PARAM_BINS, p.params[s], eps)
        else:
            type_logp[j] = _soft_onehot_log(N_PRIMITIVE_CLASSES, none_idx, eps)
            flag_logp[j] = math.log(0.5)
            param_logp[j] = -math.log(N_PARAM_BINS)
    return PrimitivePredictionSet(type_logp, flag_logp, param_logp=param_logp)


def one_hot_constraint_predictions(
    cons: list[Constraint], n_queries: int, n_primitives: int, eps: float = 1e-9
) -> ConstraintPredictionSet:
    if len(cons) > n_queries:
        raise ValueError(f"{len(cons)} constraints exceed {n_queries} queries")
    type_logp = np.empty((n_queries, N_CONSTRAINT_CLASSES))
    pointer_logp = np.full((n_queries, 2, n_primitives), -math.log(n_primitives))
    none_idx = CONSTRAINT_TYPE_INDEX[ConstraintType.NONE]
    for j in range(n_queries):
        if j < len(cons):
            c = cons[j]
            type_logp[j] = _soft_onehot_log(N_CONSTRAINT_CLASSES, CONSTRAINT_TYPE_INDEX[c.ctype], eps)
            for slot, ref in enumerate(c.refs):
                pointer_logp[j, slot] = _soft_onehot_log(n_primitives, ref, eps) if n_primitives > 1 else 0.0
        else:
            type_logp[j] = _soft_onehot_log(N_CONSTRAINT_CLASSES, none_idx, eps)
    return ConstraintPredictionSet(type_logp, pointer_logp)


def _decode_params(pred: PrimitivePredictionSet, j: int, ptype: PrimitiveType) -> tuple[int, ...]:
    params = [0] * N_PARAM_SLOTS
    for s in LIVE_SLOTS[ptype]:
        if pred.param_logp is not None:
            params[s] = int(np.argmax(pred.param_logp[j, s]))
        else:
            params[s] = quantize(float(pred.param_value[j, s]))
    # Circle radius bin 0 is invalid; snap up to the smallest legal radius.
    if ptype is PrimitiveType.CIRCLE and params[6] < 1:
        params[6] = 1
    return tuple(params)


def decode_primitives_by_query(pred: PrimitivePredictionSet) -> list[Primitive | None]:
    """Argmax decode per query; None where the no-object class wins."""
    out: list[Primitive | None] = []
    for j in range(pred.n_queries):
        ptype = PRIMITIVE_TYPES[int(np.argmax(pred.type_logp[j]))]
        if ptype is PrimitiveType.NONE:
            out.append(None)
            continue
        flag = bool(np.argmax(pred.flag_logp[j]))
        out.append(Primitive(ptype, flag, _decode_params(pred, j, ptype)))
    return out


def decode_predictions(pred: PrimitivePredictionSet) -> list[Primitive]:
    """Decoded primitive list in query order, no-object queries dropped."""
    return [p for p in decode_primitives_by_query(pred) if p is not None]


def decode_constraints_by_query(pred: ConstraintPredictionSet) -> list[Constraint | None]:
    """Argmax decode per query; drops no-object and self-referential pairs."""
    out: list[Constraint | None] = []
    for j in range(pred.n_queries):
        ctype = CONSTRAINT_TYPES[int(np.argmax(pred.type_logp[j]))]
        if ctype is ConstraintType.NONE:
            out.append(None)
            continue
        arity = CONSTRAINT_ARITY[ctype]
        refs = tuple(int(np.argmax(pred.pointer_logp[j, slot])) for slot in range(arity))
        if arity == 2 and refs[0] == refs[1]:
            out.append(None)
            continue
        out.append(canonicalize_constraint(Constraint(ctype, refs)))
    return out


def decode_constraints(pred: ConstraintPredictionSet, k_p: int | None = None) -> list[Constraint]:
    """Decoded constraint list, deduplicated keeping the first occurrence."""
    out: list[Constraint] = []
    seen: set[tuple[ConstraintType, tuple[int, ...]]] = set()
    for c in decode_constraints_by_query(pred):
        if c is None:
            continue
        if k_p is not None and any(r >= k_p for r in c.refs):
            continue
        key = (c.ctype, c.refs)
        if key not in seen:
            seen.add(key)
            out.append(c)
    return out


def dequantized_params(p: Primitive) -> np.ndarray:
    """All 7 slots mapped to bin centers (padding slots included)."""
    return np.array([dequantize(v) for v in p.params])
