"""Dequantized geometry of primitives: endpoints, circumcircles, sampling.

Everything here works on bin-center (dequantized) coordinates in the unit
square; callers hand in quantized primitives.
"""

from __future__ import annotations

import math

from ..errors import InvalidInputError
from .quantize import dequantize
from .types import GRID, Primitive, PrimitiveType, QuantGrid

Point2 = tuple[float, float]

# Exactly-collinear int-grid triples produce an exactly-zero cross product
# (bin centers are dyadic rationals); the epsilon only guards float noise.
_COLLINEAR_EPS = 1e-12


def dequant_point(qx: int, qy: int, grid: QuantGrid = GRID) -> Point2:
    return (dequantize(qx, grid), dequantize(qy, grid))


def line_endpoints(p: Primitive, grid: QuantGrid = GRID) -> tuple[Point2, Point2]:
    a = dequant_point(p.params[0], p.params[1], grid)
    b = dequant_point(p.params[2], p.params[3], grid)
    return a, b


def circle_center_radius(p: Primitive, grid: QuantGrid = GRID) -> tuple[Point2, float]:
    center = dequant_point(p.params[0], p.params[1], grid)
    return center, dequantize(p.params[6], grid)


def arc_points(p: Primitive, grid: QuantGrid = GRID) -> tuple[Point2, Point2, Point2]:
    """Start, mid (on-curve), end of an arc."""
    return (
        dequant_point(p.params[0], p.params[1], grid),
        dequant_point(p.params[2], p.params[3], grid),
        dequant_point(p.params[4], p.params[5], grid),
    )


def point_location(p: Primitive, grid: QuantGrid = GRID) -> Point2:
    return dequant_point(p.params[0], p.params[1], grid)


def cross2(o: Point2, a: Point2, b: Point2) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def circumcircle(a: Point2, b: Point2, c: Point2) -> tuple[Point2, float]:
    """Center and radius of the circle through three non-collinear points."""
    d = 2.0 * cross2(a, b, c)
    if abs(d) < _COLLINEAR_EPS:
        raise InvalidInputError("collinear points have no circumcircle")
    a2 = a[0] * a[0] + a[1] * a[1]
    b2 = b[0] * b[0] + b[1] * b[1]
    c2 = c[0] * c[0] + c[1] * c[1]
    ux = (a2 * (b[1] - c[1]) + b2 * (c[1] - a[1]) + c2 * (a[1] - b[1])) / d
    uy = (a2 * (c[0] - b[0]) + b2 * (a[0] - c[0]) + c2 * (b[0] - a[0])) / d
    r = math.hypot(a[0] - ux, a[1] - uy)
    return (ux, uy), r


def arc_is_degenerate(p: Primitive, grid: QuantGrid = GRID) -> bool:
    a, m, b = arc_points(p, grid)
    return abs(cross2(a, m, b)) < _COLLINEAR_EPS


def _ccw_delta(u: float, v: float) -> float:
    return (v - u) % (2.0 * math.pi)


def arc_angles(p: Primitive, grid: QuantGrid = GRID) -> tuple[Point2, float, float, float]:
    """Circumcircle center/radius plus signed sweep of an arc.

    Returns (center, radius, start_angle, signed_sweep) where the arc runs
    start_angle .. start_angle + signed_sweep and passes through the mid
    point. Raises for collinear control points.
    """
    a, m, b = arc_points(p, grid)
    center, r = circumcircle(a, m, b)
    ang_a = math.atan2(a[1] - center[1], a[0] - center[0])
    ang_m = math.atan2(m[1] - center[1], m[0] - center[0])
    ang_b = math.atan2(b[1] - center[1], b[0] - center[0])
    if _ccw_delta(ang_a, ang_m) <= _ccw_delta(ang_a, ang_b):
        sweep = _ccw_delta(ang_a, ang_b)
    else:
        sweep = -(2.0 * math.pi - _ccw_delta(ang_a, ang_b))
    return center, r, ang_a, sweep


def sample_float_params(ptype: PrimitiveType, params, n: int) -> list[Point2]:
    """Sample n points along a primitive given real-valued parameter slots.

    Lines and arcs include both endpoints exactly; circles are sampled at n
    equal angles; points repeat n times.
    """
    if n < 2:
        raise InvalidInputError("need at least 2 sample points")
    if ptype is PrimitiveType.LINE:
        ax, ay, bx, by = params[0], params[1], params[2], params[3]
        out = []
        for k in range(n):
            t = k / (n - 1)
            out.append((ax + (bx - ax) * t, ay + (by - ay) * t))
        out[0] = (ax, ay)
        out[-1] = (bx, by)
        return out
    if ptype is PrimitiveType.CIRCLE:
        cx, cy, r = params[0], params[1], params[6]
        return [
            (cx + r * math.cos(2.0 * math.pi * k / n), cy + r * math.sin(2.0 * math.pi * k / n))
            for k in range(n)
        ]
    if ptype is PrimitiveType.ARC:
        a = (params[0], params[1])
        m = (params[2], params[3])
        b = (params[4], params[5])
        center, r = circumcircle(a, m, b)
        ang_a = math.atan2(a[1] - center[1], a[0] - center[0])
        ang_m = math.atan2(m[1] - center[1], m[0] - center[0])
        ang_b = math.atan2(b[1] - center[1], b[0] - center[0])
        if _ccw_delta(ang_a, ang_m) <= _ccw_delta(ang_a, ang_b):
            sweep = _ccw_delta(ang_a, ang_b)
        else:
            sweep = -(2.0 * math.pi - _ccw_delta(ang_a, ang_b))
        out = []
        for k in range(n):
            ang = ang_a + sweep * k / (n - 1)
            out.append((center[0] + r * math.cos(ang), center[1] + r * math.sin(ang)))
        out[0] = a
        out[-1] = b
        return out
    if ptype is PrimitiveType.POINT:
        return [(params[0], params[1])] * n
    raise InvalidInputError(f"cannot sample primitive of type {ptype.value}")


def sample_points(p: Primitive, n: int, grid: QuantGrid = GRID) -> list[Point2]:
    """Sample n points along a primitive on its dequantized geometry."""
    params = [dequantize(v, grid) for v in p.params]
    return sample_float_params(p.ptype, params, n)


def is_sampleable(p: Primitive, grid: QuantGrid = GRID) -> bool:
    """Whether the primitive has samplable geometry (degenerate arcs do not)."""
    if p.ptype is PrimitiveType.ARC:
        return not arc_is_degenerate(p, grid)
    return p.ptype is not PrimitiveType.NONE


def anchor_points(p: Primitive, grid: QuantGrid = GRID) -> list[Point2]:
    """Points that participate in coincidence: endpoints, centers, locations."""
    if p.ptype is PrimitiveType.LINE:
        return list(line_endpoints(p, grid))
    if p.ptype is PrimitiveType.CIRCLE:
        return [circle_center_radius(p, grid)[0]]
    if p.ptype is PrimitiveType.ARC:
        a, _, b = arc_points(p, grid)
        return [a, b]
    if p.ptype is PrimitiveType.POINT:
        return [point_location(p, grid)]
    return []


def line_length(p: Primitive, grid: QuantGrid = GRID) -> float:
    a, b = line_endpoints(p, grid)
    return math.hypot(b[0] - a[0], b[1] - a[1])


def line_direction(p: Primitive, grid: QuantGrid = GRID) -> Point2:
    """Unit direction of a line; raises on zero-length segments."""
    a, b = line_endpoints(p, grid)
    length = math.hypot(b[0] - a[0], b[1] - a[1])
    if length == 0.0:
        raise InvalidInputError("zero-length line has no direction")
    return ((b[0] - a[0]) / length, (b[1] - a[1]) / length)


def point_segment_distance(pt: Point2, a: Point2, b: Point2) -> float:
    """Distance from a point to the infinite line through a segment."""
    length = math.hypot(b[0] - a[0], b[1] - a[1])
    if length == 0.0:
        return math.hypot(pt[0] - a[0], pt[1] - a[1])
    return abs(cross2(a, b, pt)) / length
