"""Two-stage inference and corpus-level evaluation, shared by the CLI, the
HTTP service and the acceptance suite."""

from __future__ import annotations

import time
from typing import Sequence

import numpy as np
import torch

from .core import Constraint, Primitive, Sketch, is_sampleable
from .data import NoiseConfig, perturb_primitives
from .errors import ConfigError
from .metrics import (
    ConstraintMetrics,
    PrimitiveMetrics,
    chamfer_distance,
    constraint_metrics,
    metrics_report,
    primitive_metrics,
)
from .models.constraint import ConstraintNet
from .models.primitive import PrimitiveNet
from .models.training import load_model
from .predictions import decode_constraints, decode_predictions, decode_primitives_by_query
from .snap import apply_constraints


def load_primitive_model(ckpt_dir) -> PrimitiveNet:
    model, _, stage = load_model(ckpt_dir)
    if stage != "primitive":
        raise ConfigError(f"checkpoint {ckpt_dir} holds a {stage} model, expected primitive")
    return model


def load_constraint_model(ckpt_dir) -> ConstraintNet:
    model, _, stage = load_model(ckpt_dir)
    if stage != "constraint":
        raise ConfigError(f"checkpoint {ckpt_dir} holds a {stage} model, expected constraint")
    return model


def _prim_dict(p: Primitive) -> dict:
    return {"type": p.ptype.value, "flag": bool(p.flag), "params": [int(v) for v in p.params]}


def _cons_dict(c: Constraint) -> dict:
    return {"type": c.ctype.value, "refs": [int(r) for r in c.refs]}


def predict_primitives(model: PrimitiveNet, image: np.ndarray):
    with torch.no_grad():
        outs = model(torch.tensor(image[None], dtype=torch.float32))
    return outs.prediction_set(0)


def predict_constraints(model: ConstraintNet, prims: list[Primitive]):
    with torch.no_grad():
        outs = model([prims])
    return outs.prediction_set(0)


def parse_image(
    image: np.ndarray,
    prim_model: PrimitiveNet,
    cons_model: ConstraintNet | None,
    snap: bool = False,
) -> dict:
    """Full pipeline on one 128x128 grayscale image -> sketch JSON dict."""
    t0 = time.monotonic()
    prims = decode_predictions(predict_primitives(prim_model, image))
    cons: list[Constraint] = []
    if cons_model is not None and prims:
        cons = decode_constraints(predict_constraints(cons_model, prims), k_p=len(prims))
    out = {
        "primitives": [_prim_dict(p) for p in prims],
        "constraints": [_cons_dict(c) for c in cons],
    }
    if snap:
        out["snapped_primitives"] = [_prim_dict(p) for p in apply_constraints(prims, cons)]
    out["timing_ms"] = (time.monotonic() - t0) * 1000.0
    return out


def parse_primitives(prims: list[Primitive], cons_model: ConstraintNet, snap: bool = False) -> dict:
    """Constraint stage alone, for primitive-only sketch inputs."""
    t0 = time.monotonic()
    cons = decode_constraints(predict_constraints(cons_model, prims), k_p=len(prims)) if prims else []
    out = {
        "primitives": [_prim_dict(p) for p in prims],
        "constraints": [_cons_dict(c) for c in cons],
    }
    if snap:
        out["snapped_primitives"] = [_prim_dict(p) for p in apply_constraints(prims, cons)]
    out["timing_ms"] = (time.monotonic() - t0) * 1000.0
    return out


def evaluate_primitive_stage(
    model: PrimitiveNet,
    records: Sequence[tuple[int, np.ndarray, Sketch]],
    eta: int = 1,
    with_cd: bool = True,
    apply_gt_constraints: bool = False,
) -> dict:
    """Mean primitive metrics (and Chamfer distance) over corpus records.

    With apply_gt_constraints, additionally reports parameter accuracy after
    snapping each decoded set against the ground-truth constraint list.
    """
    accs: list[PrimitiveMetrics] = []
    corrected: list[PrimitiveMetrics] = []
    cds: list[float] = []
    for _, image, sketch in records:
        pred = predict_primitives(model, image)
        accs.append(primitive_metrics(sketch.primitives, pred, eta=eta, weights=model.cfg.loss_weights))
        by_query = decode_primitives_by_query(pred)
        if with_cd:
            decoded = [p for p in by_query if p is not None and is_sampleable(p)]
            if decoded:
                cds.append(chamfer_distance(Sketch(tuple(decoded)), sketch))
        if apply_gt_constraints:
            kept = [(j, p) for j, p in enumerate(by_query) if p is not None]
            remap = {j: k for k, (j, _) in enumerate(kept)}
            usable = [
                Constraint(c.ctype, tuple(remap[r] for r in c.refs))
                for c in sketch.constraints
                if all(r in remap for r in c.refs)
            ]
            snapped = apply_constraints([p for _, p in kept], usable)
            override: list[Primitive | None] = [None] * pred.n_queries
            for (j, _), fixed in zip(kept, snapped):
                override[j] = fixed
            corrected.append(
                primitive_metrics(
                    sketch.primitives, pred, eta=eta, weights=model.cfg.loss_weights, params_override=override
                )
            )
    out = {
        "acc_p_type": float(np.mean([m.acc_type for m in accs])),
        "acc_flag": float(np.mean([m.acc_flag for m in accs])),
        "acc_p_par": float(np.mean([m.acc_par for m in accs])),
        "n": len(accs),
    }
    if with_cd:
        out["cd"] = float(np.mean(cds)) if cds else None
    if apply_gt_constraints:
        out["acc_p_par_corrected"] = float(np.mean([m.acc_par for m in corrected]))
    return out


def evaluate_constraint_stage(
    model: ConstraintNet,
    records: Sequence[tuple[int, np.ndarray, Sketch]],
    regime: str = "noiseless",
    noise: NoiseConfig | None = None,
    seed: int = 9999,
) -> dict:
    """Mean constraint metrics; the noisy regime perturbs input primitives."""
    noise = noise or NoiseConfig()
    accs: list[ConstraintMetrics] = []
    for i, (_, _, sketch) in enumerate(records):
        if not sketch.constraints:
            continue
        if regime == "noisy":
            inputs = list(perturb_primitives(sketch, noise, np.random.default_rng([seed, i])).primitives)
        else:
            inputs = list(sketch.primitives)
        pred = predict_constraints(model, inputs)
        accs.append(constraint_metrics(sketch.constraints, pred, weights=model.cfg.loss_weights))
    return {
        "acc_c_type": float(np.mean([m.acc_type for m in accs])) if accs else None,
        "acc_c_par": float(np.mean([m.acc_par for m in accs])) if accs else None,
        "n": len(accs),
    }


def full_report(prim_eval: dict | None, cons_eval: dict | None) -> dict:
    prim = (
        PrimitiveMetrics(prim_eval["acc_p_type"], prim_eval["acc_flag"], prim_eval["acc_p_par"])
        if prim_eval
        else None
    )
    cons = (
        ConstraintMetrics(cons_eval["acc_c_type"], cons_eval["acc_c_par"])
        if cons_eval and cons_eval["acc_c_type"] is not None
        else None
    )
    cd = prim_eval.get("cd") if prim_eval else None
    n = (prim_eval or cons_eval or {"n": 0})["n"]
    report = metrics_report(prim, cons, cd, n)
    if prim_eval and "acc_p_par_corrected" in prim_eval:
        report["acc_p_par_corrected"] = prim_eval["acc_p_par_corrected"]
    return report
