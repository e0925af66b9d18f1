"""Sketch validation: structural invariants plus geometric consistency.

Validation never raises; it collects violations so callers can report all
problems at once. Geometric checks use a tolerance of two quantization
steps (one step of slack per endpoint involved).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import (
    anchor_points,
    arc_is_degenerate,
    arc_angles,
    circle_center_radius,
    line_direction,
    line_endpoints,
    line_length,
    point_location,
    point_segment_distance,
)
from .types import (
    CONSTRAINT_ARITY,
    GRID,
    N_PARAM_SLOTS,
    Constraint,
    ConstraintType,
    Primitive,
    PrimitiveType,
    QuantGrid,
    SYMMETRIC_CONSTRAINTS,
    Sketch,
)

TAU_GEO = 2.0 / 64.0


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


def _check_primitive(i: int, p: Primitive, grid: QuantGrid) -> list[Violation]:
    out: list[Violation] = []
    if p.ptype is PrimitiveType.NONE:
        out.append(Violation("bad-type", f"primitive {i}: padding type stored in sketch"))
        return out
    for s in range(N_PARAM_SLOTS):
        if not 0 <= p.params[s] < grid.levels:
            out.append(
                Violation("param-out-of-range", f"primitive {i}: slot {s} value {p.params[s]} outside grid")
            )
    live = set(p.live_slots)
    for s in range(N_PARAM_SLOTS):
        if s not in live and p.params[s] != 0:
            out.append(Violation("padding-nonzero", f"primitive {i}: padding slot {s} holds {p.params[s]}"))
    if out:
        return out
    if p.ptype is PrimitiveType.CIRCLE and p.params[6] < 1:
        out.append(Violation("radius-zero", f"primitive {i}: circle radius bin must be >= 1"))
    if p.ptype is PrimitiveType.ARC and arc_is_degenerate(p, grid):
        out.append(Violation("arc-collinear", f"primitive {i}: arc control points are collinear"))
    if p.ptype is PrimitiveType.LINE and line_length(p, grid) == 0.0:
        out.append(Violation("line-degenerate", f"primitive {i}: zero-length line"))
    return out


def _curve_center_radius(p: Primitive, grid: QuantGrid):
    if p.ptype is PrimitiveType.CIRCLE:
        return circle_center_radius(p, grid)
    center, r, _, _ = arc_angles(p, grid)
    return center, r


def _angle_tolerance(pa: Primitive, pb: Primitive, grid: QuantGrid) -> float:
    # Moving one endpoint by tau tilts a length-L segment by ~tau/L.
    shortest = min(line_length(pa, grid), line_length(pb, grid))
    if shortest == 0.0:
        return 1.0
    return min(1.0, 2.0 * TAU_GEO / shortest)


def _check_geometry(k: int, c: Constraint, prims: tuple[Primitive, ...], grid: QuantGrid) -> list[Violation]:
    refs = [prims[r] for r in c.refs]
    t = c.ctype

    def bad_refs(expected: str) -> list[Violation]:
        got = ", ".join(p.ptype.value for p in refs)
        return [Violation("incompatible-refs", f"constraint {k}: {t.value} needs {expected}, got {got}")]

    def violated(detail: str) -> list[Violation]:
        return [Violation("geometry-violated", f"constraint {k}: {t.value} {detail}")]

    if t in (ConstraintType.HORIZONTAL, ConstraintType.VERTICAL):
        (p,) = refs
        if p.ptype is not PrimitiveType.LINE:
            return bad_refs("a line")
        (x1, y1), (x2, y2) = line_endpoints(p, grid)
        delta = abs(y1 - y2) if t is ConstraintType.HORIZONTAL else abs(x1 - x2)
        if delta > TAU_GEO:
            return violated(f"off by {delta:.4f}")
        return []

    if t is ConstraintType.COINCIDENT:
        pa, pb = refs
        dist = min(
            math.hypot(a[0] - b[0], a[1] - b[1])
            for a in anchor_points(pa, grid)
            for b in anchor_points(pb, grid)
        )
        if dist > TAU_GEO:
            return violated(f"nearest anchors {dist:.4f} apart")
        return []

    if t in (ConstraintType.PARALLEL, ConstraintType.PERPENDICULAR):
        pa, pb = refs
        if pa.ptype is not PrimitiveType.LINE or pb.ptype is not PrimitiveType.LINE:
            return bad_refs("two lines")
        ua, ub = line_direction(pa, grid), line_direction(pb, grid)
        if t is ConstraintType.PARALLEL:
            residual = abs(ua[0] * ub[1] - ua[1] * ub[0])
        else:
            residual = abs(ua[0] * ub[0] + ua[1] * ub[1])
        if residual > _angle_tolerance(pa, pb, grid):
            return violated(f"angular residual {residual:.4f}")
        return []

    if t is ConstraintType.TANGENT:
        pa, pb = refs
        kinds = {p.ptype for p in refs}
        curves = [p for p in refs if p.ptype in (PrimitiveType.CIRCLE, PrimitiveType.ARC)]
        if PrimitiveType.LINE in kinds and len(curves) == 1:
            line = pa if pa.ptype is PrimitiveType.LINE else pb
            center, r = _curve_center_radius(curves[0], grid)
            a, b = line_endpoints(line, grid)
            residual = abs(point_segment_distance(center, a, b) - r)
        elif len(curves) == 2:
            (c1, r1), (c2, r2) = (_curve_center_radius(p, grid) for p in curves)
            gap = math.hypot(c1[0] - c2[0], c1[1] - c2[1])
            residual = min(abs(gap - (r1 + r2)), abs(gap - abs(r1 - r2)))
        else:
            return bad_refs("a line and a curve, or two curves")
        if residual > TAU_GEO:
            return violated(f"tangency residual {residual:.4f}")
        return []

    if t is ConstraintType.EQUAL:
        pa, pb = refs
        if pa.ptype is PrimitiveType.LINE and pb.ptype is PrimitiveType.LINE:
            residual = abs(line_length(pa, grid) - line_length(pb, grid))
            limit = 2.0 * TAU_GEO
        elif all(p.ptype in (PrimitiveType.CIRCLE, PrimitiveType.ARC) for p in refs):
            (_, r1), (_, r2) = (_curve_center_radius(p, grid) for p in refs)
            residual = abs(r1 - r2)
            limit = TAU_GEO
        else:
            return bad_refs("two lines or two curves")
        if residual > limit:
            return violated(f"size residual {residual:.4f}")
        return []

    if t is ConstraintType.MIDPOINT:
        pa, pb = refs
        if pa.ptype is not PrimitiveType.POINT or pb.ptype is not PrimitiveType.LINE:
            return bad_refs("a point then a line")
        (x1, y1), (x2, y2) = line_endpoints(pb, grid)
        loc = point_location(pa, grid)
        dist = math.hypot(loc[0] - (x1 + x2) / 2.0, loc[1] - (y1 + y2) / 2.0)
        if dist > TAU_GEO:
            return violated(f"point {dist:.4f} from midpoint")
        return []

    return []


def validate_sketch(s: Sketch, grid: QuantGrid = GRID) -> list[Violation]:
    """All invariant violations of a sketch; empty list means valid."""
    out: list[Violation] = []
    if len(s.primitives) < 1:
        out.append(Violation("empty-sketch", "sketch holds no primitives"))
    bad_prims: set[int] = set()
    for i, p in enumerate(s.primitives):
        probs = _check_primitive(i, p, grid)
        if probs:
            bad_prims.add(i)
            out.extend(probs)

    seen: set[tuple[ConstraintType, tuple[int, ...]]] = set()
    for k, c in enumerate(s.constraints):
        if c.ctype is ConstraintType.NONE:
            out.append(Violation("bad-type", f"constraint {k}: padding type stored in sketch"))
            continue
        arity = CONSTRAINT_ARITY[c.ctype]
        if len(c.refs) != arity:
            out.append(
                Violation("arity-mismatch", f"constraint {k}: {c.ctype.value} takes {arity} refs, got {len(c.refs)}")
            )
            continue
        if any(not 0 <= r < len(s.primitives) for r in c.refs):
            out.append(Violation("ref-out-of-range", f"constraint {k}: ref out of range {c.refs}"))
            continue
        if arity == 2 and c.refs[0] == c.refs[1]:
            out.append(Violation("refs-not-distinct", f"constraint {k}: refs not distinct {c.refs}"))
            continue
        if c.ctype in SYMMETRIC_CONSTRAINTS and arity == 2 and c.refs[0] > c.refs[1]:
            out.append(Violation("refs-not-canonical", f"constraint {k}: refs not sorted {c.refs}"))
            continue
        key = (c.ctype, c.refs)
        if key in seen:
            out.append(Violation("duplicate-constraint", f"constraint {k}: duplicate {c.ctype.value}{c.refs}"))
            continue
        seen.add(key)
        if not any(r in bad_prims for r in c.refs):
            out.extend(_check_geometry(k, c, s.primitives, grid))
    return out


def is_valid(s: Sketch, grid: QuantGrid = GRID) -> bool:
    return not validate_sketch(s, grid)
