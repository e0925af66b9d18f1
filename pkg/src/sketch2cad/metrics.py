"""Evaluation metrics: set accuracies under matched assignment, Chamfer
distance between sampled sketches, and quantization error.

Accuracies reuse the training cost matrices for matching, so evaluation is
consistent with the learning objective. Parameter accuracy tolerates one
quantization step per slot and requires every live slot of the ground-truth
type to be within tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .core import (
    CONSTRAINT_ARITY,
    CONSTRAINT_TYPE_INDEX,
    LIVE_SLOTS,
    PRIMITIVE_TYPE_INDEX,
    Constraint,
    Primitive,
    Sketch,
    canonicalize_constraint,
    quantize,
    sample_points,
)
from .core.geometry import sample_float_params
from .data.generate import FloatPrimitive, quantize_float_primitive
from .errors import InvalidInputError
from .matching import (
    DEFAULT_CONSTRAINT_WEIGHTS,
    DEFAULT_PRIMITIVE_WEIGHTS,
    constraint_cost_matrix,
    hungarian,
    primitive_cost_matrix,
)
from .predictions import ConstraintPredictionSet, PrimitivePredictionSet

DEFAULT_ETA = 1


@dataclass(frozen=True)
class PrimitiveMetrics:
    acc_type: float
    acc_flag: float
    acc_par: float


@dataclass(frozen=True)
class ConstraintMetrics:
    acc_type: float
    acc_par: float


def _predicted_params(pred: PrimitivePredictionSet, j: int) -> np.ndarray:
    if pred.param_logp is not None:
        return np.argmax(pred.param_logp[j], axis=1)
    return np.array([quantize(float(v)) for v in pred.param_value[j]])


def primitive_metrics(
    gt: Sketch | Sequence[Primitive],
    pred: PrimitivePredictionSet,
    eta: int = DEFAULT_ETA,
    weights: tuple[float, float, float] = DEFAULT_PRIMITIVE_WEIGHTS,
    params_override: Sequence[Primitive | None] | None = None,
) -> PrimitiveMetrics:
    """Type / flag / parameter accuracies of a prediction set.

    params_override, indexed by query, substitutes corrected parameters
    (e.g. after constraint snapping) while the matching and the type/flag
    decisions still come from the raw prediction set.
    """
    gt_prims = list(gt.primitives) if isinstance(gt, Sketch) else list(gt)
    if not gt_prims:
        raise InvalidInputError("primitive metrics undefined for empty ground truth")
    sigma = hungarian(primitive_cost_matrix(gt_prims, pred, weights))
    n_type = n_flag = n_par = 0
    for i, p in enumerate(gt_prims):
        j = sigma[i]
        if int(np.argmax(pred.type_logp[j])) == PRIMITIVE_TYPE_INDEX[p.ptype]:
            n_type += 1
        if int(np.argmax(pred.flag_logp[j])) == int(p.flag):
            n_flag += 1
        if params_override is not None and params_override[j] is not None:
            pred_params = np.asarray(params_override[j].params)
        else:
            pred_params = _predicted_params(pred, j)
        live = list(LIVE_SLOTS[p.ptype])
        if all(abs(int(pred_params[s]) - p.params[s]) <= eta for s in live):
            n_par += 1
    k = len(gt_prims)
    return PrimitiveMetrics(n_type / k, n_flag / k, n_par / k)


def constraint_metrics(
    gt: Sequence[Constraint],
    pred: ConstraintPredictionSet,
    weights: tuple[float, float] = DEFAULT_CONSTRAINT_WEIGHTS,
) -> ConstraintMetrics:
    """Type and parameter accuracies; refs must match exactly (no threshold),
    compared canonically so a swapped symmetric pair still counts."""
    gt_cons = list(gt)
    if not gt_cons:
        raise InvalidInputError("constraint metrics undefined for empty ground truth")
    sigma = hungarian(constraint_cost_matrix(gt_cons, pred, weights))
    n_type = n_par = 0
    for i, c in enumerate(gt_cons):
        j = sigma[i]
        if int(np.argmax(pred.type_logp[j])) == CONSTRAINT_TYPE_INDEX[c.ctype]:
            n_type += 1
        arity = CONSTRAINT_ARITY[c.ctype]
        refs = tuple(int(np.argmax(pred.pointer_logp[j, s])) for s in range(arity))
        predicted = canonicalize_constraint(Constraint(c.ctype, refs))
        if predicted.refs == c.refs:
            n_par += 1
    k = len(gt_cons)
    return ConstraintMetrics(n_type / k, n_par / k)


def _sketch_cloud(s: Sketch, n_per_prim: int) -> np.ndarray:
    pts: list[tuple[float, float]] = []
    for p in s.primitives:
        pts.extend(sample_points(p, n_per_prim))
    return np.asarray(pts)


def chamfer_distance(a: Sketch, b: Sketch, n_per_prim: int = 64) -> float:
    """Symmetric mean nearest-neighbor distance between sampled sketches."""
    if not a.primitives or not b.primitives:
        raise InvalidInputError("Chamfer distance undefined for an empty sketch")
    ca, cb = _sketch_cloud(a, n_per_prim), _sketch_cloud(b, n_per_prim)
    d_ab, _ = cKDTree(cb).query(ca)
    d_ba, _ = cKDTree(ca).query(cb)
    return 0.5 * (float(d_ab.mean()) + float(d_ba.mean()))


def quantization_error(float_sketches: Sequence[Sequence[FloatPrimitive]], n_per_prim: int = 64) -> float:
    """Mean Chamfer distance between float sketches and their grid versions."""
    if not float_sketches:
        raise InvalidInputError("no sketches given")
    total = 0.0
    for prims in float_sketches:
        float_pts: list[tuple[float, float]] = []
        for fp in prims:
            float_pts.extend(sample_float_params(fp.ptype, fp.params, n_per_prim))
        quant = Sketch(tuple(quantize_float_primitive(fp) for fp in prims))
        ca = np.asarray(float_pts)
        cb = _sketch_cloud(quant, n_per_prim)
        d_ab, _ = cKDTree(cb).query(ca)
        d_ba, _ = cKDTree(ca).query(cb)
        total += 0.5 * (float(d_ab.mean()) + float(d_ba.mean()))
    return total / len(float_sketches)


def metrics_report(
    prim: PrimitiveMetrics | None,
    cons: ConstraintMetrics | None,
    cd: float | None,
    n: int,
) -> dict:
    """The JSON payload emitted by CLI evaluation."""
    return {
        "acc_p_type": None if prim is None else prim.acc_type,
        "acc_flag": None if prim is None else prim.acc_flag,
        "acc_p_par": None if prim is None else prim.acc_par,
        "acc_c_type": None if cons is None else cons.acc_type,
        "acc_c_par": None if cons is None else cons.acc_par,
        "cd": cd,
        "n": n,
    }
