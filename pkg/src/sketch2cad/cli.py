"""Command-line pipeline: data generation, training, evaluation, inference.

Exit codes: 0 ok, 2 configuration error, 3 I/O error, 4 numerical failure.
The SKETCH2CAD_SEED environment variable supplies the default seed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from .core import Sketch, is_sampleable, sketch_from_dict
from .data import Corpus, GenConfig, NoiseConfig, build_corpus, image_from_png_bytes, rasterize
from .errors import ConfigError, DivergenceError, ParseError, SketchCadError
from .models import (
    ConstraintModelConfig,
    OptimConfig,
    PrimitiveModelConfig,
    train_constraint,
    train_primitive,
)
from . import pipeline
from .models.training import load_model

EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4


def _default_seed() -> int:
    return int(os.environ.get("SKETCH2CAD_SEED", "0"))


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON: {e}") from e


def _build_config(cls, overrides: dict):
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(overrides) - known
    if unknown:
        raise ConfigError(f"unknown {cls.__name__} fields: {sorted(unknown)}")
    return cls(**overrides)


def cmd_gen_data(args) -> int:
    cfg = GenConfig(
        min_primitives=args.min_prims,
        max_primitives=args.max_prims,
        constraint_density=args.density,
        seed=args.seed,
    )
    if args.n < 1:
        raise ConfigError("--n must be >= 1")
    noise = NoiseConfig() if args.noise else None
    corpus = build_corpus(args.n, cfg, noise, args.out, seed=args.seed)
    prim_counts: Counter = Counter()
    cons_counts: Counter = Counter()
    for _, _, sketch in corpus.records():
        prim_counts.update(p.ptype.value for p in sketch.primitives)
        cons_counts.update(c.ctype.value for c in sketch.constraints)
    print(f"wrote {len(corpus)} records to {args.out}")
    print("primitives:", dict(sorted(prim_counts.items())))
    print("constraints:", dict(sorted(cons_counts.items())))
    return 0


def cmd_train(args) -> int:
    overrides = _load_json(args.config) if args.config else {}
    model_over = overrides.get("model", {})
    optim_over = overrides.get("optim", {})
    if "seed" not in optim_over:
        optim_over["seed"] = args.seed
    optim_cfg = _build_config(OptimConfig, optim_over)
    corpus = Corpus(Path(args.corpus), seed=args.seed)
    if not Path(args.corpus).exists():
        raise FileNotFoundError(f"corpus not found: {args.corpus}")
    if args.stage == "primitive":
        model_cfg = _build_config(PrimitiveModelConfig, model_over)
        _, log = train_primitive(corpus, model_cfg, optim_cfg, args.out, resume=args.resume)
    else:
        model_cfg = _build_config(ConstraintModelConfig, model_over)
        _, log = train_constraint(
            corpus, model_cfg, optim_cfg, args.out, regime=args.regime, resume=args.resume
        )
    final = log[-1]["loss"]["total"] if log else float("nan")
    print(f"trained {args.stage} for {len(log)} epochs; final loss {final:.4f}; checkpoint at {args.out}")
    return 0


def cmd_eval(args) -> int:
    model, _, stage = load_model(args.checkpoint)
    if stage != args.stage:
        raise ConfigError(f"checkpoint holds a {stage} model but --stage is {args.stage}")
    corpus = Corpus(Path(args.corpus), seed=args.seed)
    records = corpus.records()
    prim_eval = cons_eval = None
    if stage == "primitive":
        prim_eval = pipeline.evaluate_primitive_stage(
            model, records, eta=args.eta, apply_gt_constraints=args.apply_constraints
        )
    else:
        cons_eval = pipeline.evaluate_constraint_stage(model, records, regime=args.regime, seed=args.seed)
    report = pipeline.full_report(prim_eval, cons_eval)
    text = json.dumps(report, indent=2)
    print(text)
    if args.out:
        Path(args.out).write_text(text)
    return 0


def _read_image(path: str) -> np.ndarray:
    try:
        raw = Path(path).read_bytes()
    except OSError:
        raise
    try:
        return image_from_png_bytes(raw)
    except ValueError as e:
        raise ConfigError(str(e)) from e


def cmd_infer(args) -> int:
    if bool(args.image) == bool(args.sketch):
        raise ConfigError("exactly one of --image or --sketch is required")
    if args.image:
        if not args.prim_ckpt:
            raise ConfigError("--image inference needs --prim-ckpt")
        prim_model = pipeline.load_primitive_model(args.prim_ckpt)
        cons_model = pipeline.load_constraint_model(args.cons_ckpt) if args.cons_ckpt else None
        image = _read_image(args.image)
        result = pipeline.parse_image(image, prim_model, cons_model, snap=args.snap)
    else:
        if not args.cons_ckpt:
            raise ConfigError("--sketch inference needs --cons-ckpt")
        cons_model = pipeline.load_constraint_model(args.cons_ckpt)
        sketch = sketch_from_dict(_load_json(args.sketch))
        result = pipeline.parse_primitives(list(sketch.primitives), cons_model, snap=args.snap)
        image = None
    text = json.dumps(result, indent=2)
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text)
    if args.overlay:
        _write_overlay(args.overlay, image, result)
    return 0


def _write_overlay(path: str, image: np.ndarray | None, result: dict) -> None:
    from PIL import Image

    prims = result.get("snapped_primitives") or result["primitives"]
    sketch = sketch_from_dict({"primitives": prims, "constraints": []})
    drawable = tuple(p for p in sketch.primitives if is_sampleable(p))
    pred = rasterize(Sketch(drawable)) if drawable else np.zeros((128, 128), dtype=np.float32)
    base = image if image is not None else np.zeros_like(pred)
    rgb = np.stack(
        [np.maximum(base * 0.5, pred), base * 0.5, base * 0.5], axis=-1
    )
    Image.fromarray((np.clip(rgb, 0, 1) * 255).astype(np.uint8), mode="RGB").save(path)


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(args.prim_ckpt, args.cons_ckpt)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sketch2cad", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-data", help="generate a synthetic corpus")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=_default_seed())
    g.add_argument("--out", required=True)
    g.add_argument("--noise", action=argparse.BooleanOptionalAction, default=False)
    g.add_argument("--min-prims", type=int, default=3)
    g.add_argument("--max-prims", type=int, default=12)
    g.add_argument("--density", type=float, default=1.2)
    g.set_defaults(func=cmd_gen_data)

    t = sub.add_parser("train", help="train one stage")
    t.add_argument("--stage", choices=["primitive", "constraint"], required=True)
    t.add_argument("--corpus", required=True)
    t.add_argument("--config", help="JSON config overriding model/optim fields")
    t.add_argument("--out", required=True)
    t.add_argument("--regime", choices=["noiseless", "noisy"], default="noiseless")
    t.add_argument("--seed", type=int, default=_default_seed())
    t.add_argument("--resume", action="store_true")
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("eval", help="evaluate a checkpoint on a corpus")
    e.add_argument("--stage", choices=["primitive", "constraint"], required=True)
    e.add_argument("--checkpoint", required=True)
    e.add_argument("--corpus", required=True)
    e.add_argument("--regime", choices=["noiseless", "noisy"], default="noiseless")
    e.add_argument("--apply-constraints", action="store_true")
    e.add_argument("--eta", type=int, default=1)
    e.add_argument("--seed", type=int, default=_default_seed())
    e.add_argument("--out")
    e.set_defaults(func=cmd_eval)

    i = sub.add_parser("infer", help="parse one image or sketch")
    i.add_argument("--image")
    i.add_argument("--sketch")
    i.add_argument("--prim-ckpt")
    i.add_argument("--cons-ckpt")
    i.add_argument("--snap", action="store_true")
    i.add_argument("--out")
    i.add_argument("--overlay")
    i.set_defaults(func=cmd_infer)

    s = sub.add_parser("serve", help="run the HTTP inference service")
    s.add_argument("--prim-ckpt", required=True)
    s.add_argument("--cons-ckpt", required=True)
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8000)
    s.set_defaults(func=cmd_serve)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as e:
        if isinstance(e, ParseError):
            print(f"error: {e}", file=sys.stderr)
            return EXIT_IO
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except SketchCadError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
