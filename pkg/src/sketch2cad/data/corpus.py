"""Corpus files: line-delimited (image, sketch) records, plus the external
sketch-file importer."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..core import (
    Constraint,
    ConstraintType,
    LIVE_SLOTS,
    Primitive,
    PrimitiveType,
    Sketch,
    canonicalize_constraint,
    quantize,
    sketch_from_dict,
    sketch_to_dict,
    validate_sketch,
)
from ..errors import ParseError
from .generate import GenConfig, generate_sketch
from .noise import NoiseConfig
from .raster import RasterImage, image_from_png_b64, image_to_png_b64, rasterize


@dataclass
class Corpus:
    """Handle over a corpus file; iteration is deterministic given the seed."""

    path: Path
    seed: int = 0
    _count: int | None = field(default=None, repr=False)
    _cache: list | None = field(default=None, repr=False)

    def __len__(self) -> int:
        if self._count is None:
            with open(self.path, "r", encoding="utf-8") as f:
                self._count = sum(1 for line in f if line.strip())
        return self._count

    def records(self) -> list[tuple[int, RasterImage, Sketch]]:
        if self._cache is not None:
            return self._cache
        out = []
        with open(self.path, "r", encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    img = image_from_png_b64(rec["image_png_b64"])
                    sketch = sketch_from_dict(rec["sketch"])
                    out.append((int(rec["id"]), img, sketch))
                except Exception as e:
                    raise ParseError(f"corpus line {lineno} of {self.path}: {e}") from e
        self._count = len(out)
        self._cache = out
        return out

    def batches(self, batch_size: int, epoch: int = 0):
        """Shuffled (image, sketch) batches; order derived from (seed, epoch)."""
        recs = self.records()
        order = np.random.default_rng([self.seed, epoch]).permutation(len(recs))
        for start in range(0, len(recs), batch_size):
            chunk = order[start : start + batch_size]
            yield [(recs[i][1], recs[i][2]) for i in chunk]


def build_corpus(
    n: int,
    cfg: GenConfig,
    noise: NoiseConfig | None,
    path: str | Path,
    seed: int | None = None,
) -> Corpus:
    """Generate and write n records; one rng per record from (seed, index)."""
    seed = cfg.seed if seed is None else seed
    path = Path(path)
    with open(path, "w", encoding="utf-8") as f:
        for i in range(n):
            rng = np.random.default_rng([seed, i])
            sketch = generate_sketch(cfg, rng)
            img = rasterize(sketch, noise, rng)
            rec = {"id": i, "image_png_b64": image_to_png_b64(img), "sketch": sketch_to_dict(sketch)}
            f.write(json.dumps(rec, separators=(",", ":")) + "\n")
    return Corpus(path, seed=seed, _count=n)


@dataclass
class ImportResult:
    sketches: list[Sketch]
    skipped: list[tuple[int, str]]  # (record index, reason)


_SUPPORTED = {t.value for t in PrimitiveType if t is not PrimitiveType.NONE}
_MARGIN = 0.05


def _float_extent(ptype: PrimitiveType, params: list[float]) -> list[tuple[float, float]]:
    if ptype is PrimitiveType.LINE:
        return [(params[0], params[1]), (params[2], params[3])]
    if ptype is PrimitiveType.CIRCLE:
        cx, cy, r = params[0], params[1], params[6]
        return [(cx - r, cy - r), (cx + r, cy + r)]
    if ptype is PrimitiveType.ARC:
        return [(params[0], params[1]), (params[2], params[3]), (params[4], params[5])]
    return [(params[0], params[1])]


def _normalize_record(obj: dict) -> Sketch:
    prims_in = obj.get("primitives", [])
    if not prims_in:
        raise ValueError("no primitives")
    parsed: list[tuple[PrimitiveType, bool, list[float]]] = []
    for rec in prims_in:
        name = rec.get("type")
        if name not in _SUPPORTED:
            raise ValueError(f"unsupported type {name!r}")
        params = [float(v) for v in rec.get("params", [])]
        if len(params) != 7:
            raise ValueError("params must have 7 entries")
        parsed.append((PrimitiveType(name), bool(rec.get("flag", True)), params))

    pts = [pt for ptype, _, params in parsed for pt in _float_extent(ptype, params)]
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    span = max(max(xs) - min(xs), max(ys) - min(ys))
    scale = (1.0 - 2.0 * _MARGIN) / span if span > 0 else 1.0
    cx, cy = (max(xs) + min(xs)) / 2.0, (max(ys) + min(ys)) / 2.0

    prims = []
    for ptype, flag, params in parsed:
        out = [0] * 7
        for s in LIVE_SLOTS[ptype]:
            if ptype is PrimitiveType.CIRCLE and s == 6:
                out[s] = max(1, quantize(min(params[6] * scale, 1.0 - 1e-9)))
            elif s % 2 == 0:
                out[s] = quantize(0.5 + (params[s] - cx) * scale)
            else:
                out[s] = quantize(0.5 + (params[s] - cy) * scale)
        prims.append(Primitive(ptype, flag, tuple(out)))

    cons = []
    seen = set()
    for rec in obj.get("constraints", []):
        ctype = ConstraintType(rec["type"])
        c = canonicalize_constraint(Constraint(ctype, tuple(int(r) for r in rec["refs"])))
        if (c.ctype, c.refs) not in seen:
            seen.add((c.ctype, c.refs))
            cons.append(c)
    return Sketch(tuple(prims), tuple(cons))


def _is_canonical(obj: dict) -> bool:
    try:
        s = sketch_from_dict(obj)
    except Exception:
        return False
    return not validate_sketch(s)


def import_external(path: str | Path) -> ImportResult:
    """Load sketches from an external file, normalizing into the unit square.

    Records that already parse as valid canonical sketches (integer bins)
    are taken as-is; anything else is treated as float geometry and
    scale-and-centered to a 5% margin before quantization. Sketches with
    unsupported primitive types are skipped and reported.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        whole = json.loads(text)
        objs = whole if isinstance(whole, list) else [whole]
    except json.JSONDecodeError:
        objs = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                objs.append(json.loads(line))
            except json.JSONDecodeError as e:
                raise ParseError(f"line {lineno}: invalid JSON: {e.msg}", position=e.pos) from e

    sketches: list[Sketch] = []
    skipped: list[tuple[int, str]] = []
    for idx, obj in enumerate(objs):
        if _is_canonical(obj):
            sketches.append(sketch_from_dict(obj))
            continue
        try:
            s = _normalize_record(obj)
        except (ValueError, KeyError, TypeError) as e:
            skipped.append((idx, str(e)))
            continue
        violations = validate_sketch(s)
        if violations:
            skipped.append((idx, f"invalid after import: {violations[0]}"))
            continue
        sketches.append(s)
    return ImportResult(sketches, skipped)
