"""Synthetic constrained-sketch generation.

Primitives are placed on the integer grid through constraint templates
(axis-aligned lines, chained endpoints, copied directions, tangent circles,
equal sizes, midpoints). The ground-truth constraint list is then *derived*
from the finished geometry with integer-exact predicates, so every relation
that holds is labeled and every label holds — tangency is the one
float-residual template and is recorded at construction time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..core import (
    Constraint,
    ConstraintType,
    GRID,
    LIVE_SLOTS,
    Primitive,
    PrimitiveType,
    Sketch,
    make_constraint,
    make_primitive,
    quantize,
    validate_sketch,
)
from ..errors import ConfigError

# Placement bounds in bins; keeps strokes clear of the image border.
_LO, _HI = 4, 59
_MIN_LINE_LEN = 10  # bins
_MAX_LINE_LEN = 40
_RADIUS_RANGE = (5, 18)
_MIN_SAGITTA = 4
_MAX_CONSTRAINTS = 36


@dataclass(frozen=True)
class GenConfig:
    min_primitives: int = 3
    max_primitives: int = 12
    type_probs: dict[str, float] = field(
        default_factory=lambda: {"line": 0.50, "circle": 0.20, "arc": 0.15, "point": 0.15}
    )
    constraint_density: float = 1.2
    seed: int = 0

    def __post_init__(self):
        if self.min_primitives < 1:
            raise ConfigError("min_primitives must be >= 1")
        if self.max_primitives < self.min_primitives:
            raise ConfigError("max_primitives < min_primitives")
        total = sum(self.type_probs.get(k, 0.0) for k in ("line", "circle", "arc", "point"))
        if abs(total - 1.0) > 1e-9:
            raise ConfigError(f"type probabilities sum to {total}, expected 1")
        if self.constraint_density < 0:
            raise ConfigError("constraint_density must be >= 0")


@dataclass(frozen=True)
class FloatPrimitive:
    """Pre-quantization primitive used for quantization-error measurement."""

    ptype: PrimitiveType
    flag: bool
    params: tuple[float, ...]


def quantize_float_primitive(p: FloatPrimitive) -> Primitive:
    live = set(LIVE_SLOTS[p.ptype])
    params = [quantize(v) if i in live else 0 for i, v in enumerate(p.params)]
    if p.ptype is PrimitiveType.CIRCLE and params[6] < 1:
        params[6] = 1
    return Primitive(p.ptype, p.flag, tuple(params))


def _choice(rng: np.random.Generator, seq):
    return seq[int(rng.integers(len(seq)))]


def _rand_point(rng) -> tuple[int, int]:
    return int(rng.integers(_LO, _HI + 1)), int(rng.integers(_LO, _HI + 1))


def _in_bounds(*coords: int) -> bool:
    return all(_LO <= c <= _HI for c in coords)


class _Builder:
    """Accumulates placed primitives plus template-recorded tangencies."""

    def __init__(self, rng: np.random.Generator, density: float):
        self.rng = rng
        self.scale = min(density / 1.2, 2.0)
        self.prims: list[Primitive] = []
        self.tangents: list[tuple[int, int]] = []

    def fire(self, p: float) -> bool:
        return self.rng.random() < min(p * self.scale, 0.95)

    # -- geometry inventory -------------------------------------------------

    def lines(self) -> list[int]:
        return [i for i, p in enumerate(self.prims) if p.ptype is PrimitiveType.LINE]

    def circles(self) -> list[int]:
        return [i for i, p in enumerate(self.prims) if p.ptype is PrimitiveType.CIRCLE]

    def anchors(self) -> list[tuple[int, int]]:
        out = []
        for p in self.prims:
            if p.ptype is PrimitiveType.LINE:
                out.append((p.params[0], p.params[1]))
                out.append((p.params[2], p.params[3]))
            elif p.ptype is PrimitiveType.ARC:
                out.append((p.params[0], p.params[1]))
                out.append((p.params[4], p.params[5]))
            elif p.ptype is PrimitiveType.POINT:
                out.append((p.params[0], p.params[1]))
            elif p.ptype is PrimitiveType.CIRCLE:
                out.append((p.params[0], p.params[1]))
        return out

    def is_duplicate(self, cand: Primitive) -> bool:
        return any(p.ptype is cand.ptype and p.params == cand.params for p in self.prims)

    def add(self, cand: Primitive) -> int:
        self.prims.append(cand)
        return len(self.prims) - 1

    # -- per-type placement -------------------------------------------------

    def _start_point(self, chain_p: float) -> tuple[int, int]:
        anchors = self.anchors()
        if anchors and self.fire(chain_p):
            return _choice(self.rng, anchors)
        return _rand_point(self.rng)

    def place_line(self) -> Primitive | None:
        rng = self.rng
        for _ in range(48):
            x1, y1 = self._start_point(chain_p=0.50)
            if self.fire(0.46):  # axis-aligned
                length = int(rng.integers(_MIN_LINE_LEN, _MAX_LINE_LEN)) * _choice(rng, (-1, 1))
                if rng.random() < 0.5:
                    x2, y2 = x1 + length, y1
                else:
                    x2, y2 = x1, y1 + length
            elif self.lines() and self.fire(0.40):  # copied direction
                src = self.prims[_choice(rng, self.lines())]
                dx, dy = src.params[2] - src.params[0], src.params[3] - src.params[1]
                g = math.gcd(abs(dx), abs(dy))
                dx, dy = dx // g, dy // g
                if rng.random() < 0.4:
                    dx, dy = -dy, dx  # perpendicular
                step = math.hypot(dx, dy)
                k = max(1, int(round(rng.integers(_MIN_LINE_LEN, _MAX_LINE_LEN) / step)))
                k *= _choice(rng, (-1, 1))
                x2, y2 = x1 + k * dx, y1 + k * dy
            elif self.lines() and self.fire(0.14):  # equal length via component swap
                src = self.prims[_choice(rng, self.lines())]
                dx, dy = abs(src.params[2] - src.params[0]), abs(src.params[3] - src.params[1])
                dx, dy = dy, dx
                x2, y2 = x1 + dx * _choice(rng, (-1, 1)), y1 + dy * _choice(rng, (-1, 1))
            else:  # free; keep accidental axis alignment out
                x2, y2 = _rand_point(rng)
                if x1 == x2 or y1 == y2:
                    continue
                if not _MIN_LINE_LEN <= math.hypot(x2 - x1, y2 - y1) <= _MAX_LINE_LEN:
                    continue
            if not _in_bounds(x2, y2) or (x1 == x2 and y1 == y2):
                continue
            cand = make_primitive(PrimitiveType.LINE, bool(rng.random() < 0.9), [x1, y1, x2, y2])
            if not self.is_duplicate(cand):
                return cand
        return None

    def place_circle(self) -> tuple[Primitive | None, int | None]:
        rng = self.rng
        for _ in range(48):
            tangent_src: int | None = None
            if self.lines() and self.fire(0.50):
                li = _choice(rng, self.lines())
                line = self.prims[li]
                ax, ay = line.params[0] + 0.5, line.params[1] + 0.5
                bx, by = line.params[2] + 0.5, line.params[3] + 0.5
                t = rng.uniform(0.3, 0.7)
                px, py = ax + (bx - ax) * t, ay + (by - ay) * t
                length = math.hypot(bx - ax, by - ay)
                nx, ny = -(by - ay) / length, (bx - ax) / length
                r = int(rng.integers(*_RADIUS_RANGE))
                side = _choice(rng, (-1, 1))
                cx = int(round(px + side * (r + 0.5) * nx - 0.5))
                cy = int(round(py + side * (r + 0.5) * ny - 0.5))
                tangent_src = li
            elif self.circles() and self.fire(0.35):  # equal radius
                src = self.prims[_choice(rng, self.circles())]
                r = src.params[6]
                cx, cy = _rand_point(rng)
            else:
                r = int(rng.integers(*_RADIUS_RANGE))
                cx, cy = _rand_point(rng)
            if not (_LO <= cx - r and cx + r <= _HI and _LO <= cy - r and cy + r <= _HI):
                continue
            cand = make_primitive(PrimitiveType.CIRCLE, bool(rng.random() < 0.85), [cx, cy, r])
            if not self.is_duplicate(cand):
                return cand, tangent_src
        return None, None

    def place_arc(self) -> Primitive | None:
        rng = self.rng
        for _ in range(48):
            x1, y1 = self._start_point(chain_p=0.45)
            x3, y3 = _rand_point(rng)
            chord = math.hypot(x3 - x1, y3 - y1)
            if not _MIN_LINE_LEN <= chord <= _MAX_LINE_LEN:
                continue
            mx, my = (x1 + x3) / 2.0, (y1 + y3) / 2.0
            nx, ny = -(y3 - y1) / chord, (x3 - x1) / chord
            sag = rng.integers(_MIN_SAGITTA, max(_MIN_SAGITTA + 1, int(chord * 0.6))) * _choice(rng, (-1, 1))
            x2, y2 = int(round(mx + sag * nx)), int(round(my + sag * ny))
            if not _in_bounds(x2, y2):
                continue
            # Rounding can collinearize shallow arcs.
            cross = (x2 - x1) * (y3 - y1) - (y2 - y1) * (x3 - x1)
            if abs(cross) < 2 * _MIN_SAGITTA:
                continue
            cand = make_primitive(PrimitiveType.ARC, bool(rng.random() < 0.9), [x1, y1, x2, y2, x3, y3])
            if not self.is_duplicate(cand):
                return cand
        return None

    def place_point(self) -> Primitive | None:
        rng = self.rng
        for _ in range(48):
            if self.lines() and self.fire(0.50):
                even = [
                    i
                    for i in self.lines()
                    if (self.prims[i].params[0] + self.prims[i].params[2]) % 2 == 0
                    and (self.prims[i].params[1] + self.prims[i].params[3]) % 2 == 0
                ]
                if even:
                    src = self.prims[_choice(rng, even)]
                    x = (src.params[0] + src.params[2]) // 2
                    y = (src.params[1] + src.params[3]) // 2
                else:
                    x, y = _rand_point(rng)
            elif self.fire(0.35) and self.anchors():
                x, y = _choice(rng, self.anchors())
            else:
                x, y = _rand_point(rng)
            cand = make_primitive(PrimitiveType.POINT, bool(rng.random() < 0.5), [x, y])
            if not self.is_duplicate(cand):
                return cand
        return None


def _derive_constraints(prims: list[Primitive], tangents: list[tuple[int, int]]) -> list[Constraint]:
    """All integer-exact relations in the finished geometry, plus tangencies."""
    out: list[Constraint] = []

    def anchors_of(p: Primitive) -> list[tuple[int, int]]:
        if p.ptype is PrimitiveType.LINE:
            return [(p.params[0], p.params[1]), (p.params[2], p.params[3])]
        if p.ptype is PrimitiveType.ARC:
            return [(p.params[0], p.params[1]), (p.params[4], p.params[5])]
        if p.ptype in (PrimitiveType.POINT, PrimitiveType.CIRCLE):
            return [(p.params[0], p.params[1])]
        return []

    for i, p in enumerate(prims):
        if p.ptype is PrimitiveType.LINE:
            if p.params[1] == p.params[3]:
                out.append(make_constraint(ConstraintType.HORIZONTAL, i))
            elif p.params[0] == p.params[2]:
                out.append(make_constraint(ConstraintType.VERTICAL, i))

    n = len(prims)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = prims[i], prims[j]
            if any(pa == pb for pa in anchors_of(a) for pb in anchors_of(b)):
                out.append(make_constraint(ConstraintType.COINCIDENT, i, j))
            if a.ptype is PrimitiveType.LINE and b.ptype is PrimitiveType.LINE:
                dax, day = a.params[2] - a.params[0], a.params[3] - a.params[1]
                dbx, dby = b.params[2] - b.params[0], b.params[3] - b.params[1]
                if dax * dby - day * dbx == 0:
                    out.append(make_constraint(ConstraintType.PARALLEL, i, j))
                elif dax * dbx + day * dby == 0:
                    out.append(make_constraint(ConstraintType.PERPENDICULAR, i, j))
                if dax * dax + day * day == dbx * dbx + dby * dby:
                    out.append(make_constraint(ConstraintType.EQUAL, i, j))
            if a.ptype is PrimitiveType.CIRCLE and b.ptype is PrimitiveType.CIRCLE:
                if a.params[6] == b.params[6]:
                    out.append(make_constraint(ConstraintType.EQUAL, i, j))
            for pt, ln in ((i, j), (j, i)):
                p_pt, p_ln = prims[pt], prims[ln]
                if p_pt.ptype is PrimitiveType.POINT and p_ln.ptype is PrimitiveType.LINE:
                    if (
                        2 * p_pt.params[0] == p_ln.params[0] + p_ln.params[2]
                        and 2 * p_pt.params[1] == p_ln.params[1] + p_ln.params[3]
                    ):
                        out.append(make_constraint(ConstraintType.MIDPOINT, pt, ln))

    for i, j in tangents:
        out.append(make_constraint(ConstraintType.TANGENT, i, j))

    seen: set[tuple[ConstraintType, tuple[int, ...]]] = set()
    unique = []
    for c in out:
        key = (c.ctype, c.refs)
        if key not in seen:
            seen.add(key)
            unique.append(c)
    return unique


def generate_sketch(cfg: GenConfig, rng: np.random.Generator) -> Sketch:
    """One valid sketch with exact-by-construction constraints."""
    type_names = ("line", "circle", "arc", "point")
    probs = np.array([cfg.type_probs.get(k, 0.0) for k in type_names])
    probs = probs / probs.sum()

    for _ in range(32):
        n = int(rng.integers(cfg.min_primitives, cfg.max_primitives + 1))
        b = _Builder(rng, cfg.constraint_density)
        while len(b.prims) < n:
            kind = type_names[int(rng.choice(4, p=probs))]
            if kind == "line":
                cand = b.place_line()
            elif kind == "circle":
                cand, tangent_src = b.place_circle()
                if cand is not None and tangent_src is not None:
                    b.tangents.append((len(b.prims), tangent_src))
            elif kind == "arc":
                cand = b.place_arc()
            else:
                cand = b.place_point()
            if cand is None:
                continue
            b.add(cand)
        cons = _derive_constraints(b.prims, b.tangents)
        if len(cons) > _MAX_CONSTRAINTS:
            continue
        sketch = Sketch(tuple(b.prims), tuple(cons))
        if not validate_sketch(sketch):
            return sketch
    raise RuntimeError("sketch generation failed to converge; config too tight")


def generate_float_sketch(cfg: GenConfig, rng: np.random.Generator) -> list[FloatPrimitive]:
    """Continuous-coordinate primitives for quantization-error measurement."""
    type_names = ("line", "circle", "arc", "point")
    probs = np.array([cfg.type_probs.get(k, 0.0) for k in type_names])
    probs = probs / probs.sum()
    lo, hi = _LO / GRID.levels, (_HI + 1) / GRID.levels
    n = int(rng.integers(cfg.min_primitives, cfg.max_primitives + 1))
    out: list[FloatPrimitive] = []
    while len(out) < n:
        kind = type_names[int(rng.choice(4, p=probs))]
        flag = bool(rng.random() < 0.9)
        if kind == "line":
            x1, y1, x2, y2 = rng.uniform(lo, hi, 4)
            if math.hypot(x2 - x1, y2 - y1) < _MIN_LINE_LEN / GRID.levels:
                continue
            out.append(FloatPrimitive(PrimitiveType.LINE, flag, (x1, y1, x2, y2, 0.0, 0.0, 0.0)))
        elif kind == "circle":
            r = rng.uniform(_RADIUS_RANGE[0] / GRID.levels, _RADIUS_RANGE[1] / GRID.levels)
            cx, cy = rng.uniform(lo + r, hi - r, 2)
            out.append(FloatPrimitive(PrimitiveType.CIRCLE, flag, (cx, cy, 0.0, 0.0, 0.0, 0.0, r)))
        elif kind == "arc":
            x1, y1, x3, y3 = rng.uniform(lo, hi, 4)
            chord = math.hypot(x3 - x1, y3 - y1)
            if not _MIN_LINE_LEN / GRID.levels <= chord <= _MAX_LINE_LEN / GRID.levels:
                continue
            sag = rng.uniform(_MIN_SAGITTA / GRID.levels, 0.6 * chord) * (1 if rng.random() < 0.5 else -1)
            nx, ny = -(y3 - y1) / chord, (x3 - x1) / chord
            x2, y2 = (x1 + x3) / 2 + sag * nx, (y1 + y3) / 2 + sag * ny
            if not (lo <= x2 <= hi and lo <= y2 <= hi):
                continue
            out.append(FloatPrimitive(PrimitiveType.ARC, flag, (x1, y1, x2, y2, x3, y3, 0.0)))
        else:
            x, y = rng.uniform(lo, hi, 2)
            out.append(FloatPrimitive(PrimitiveType.POINT, flag, (x, y, 0.0, 0.0, 0.0, 0.0, 0.0)))
    return out
