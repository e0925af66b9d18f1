"""Rasterization of sketches (and raw stroke polylines) to 128x128 images.

Strokes are drawn supersampled with PIL and box-downsampled, which gives
anti-aliasing with a 1 px minimum visual width. Hand-drawn simulation adds
per-point jitter, a random stroke width, and endpoint overshoot.
"""

from __future__ import annotations

import base64
import io
import math

import numpy as np
from PIL import Image, ImageDraw

from ..core import Primitive, PrimitiveType, Sketch, sample_points
from .noise import NoiseConfig

IMAGE_SIZE = 128
_SUPERSAMPLE = 4
_DEFAULT_WIDTH = 1.5  # px, used by the noiseless renderer

# Sample counts per primitive; circles/arcs need denser polylines.
_N_LINE = 64
_N_CURVE = 128

RasterImage = np.ndarray  # (128, 128) float32 in [0, 1]


def render_polylines(
    polylines: list[list[tuple[float, float]]],
    widths: list[float] | float = _DEFAULT_WIDTH,
    size: int = IMAGE_SIZE,
) -> RasterImage:
    """Draw unit-square polylines; x maps to columns, y to rows."""
    if isinstance(widths, (int, float)):
        widths = [float(widths)] * len(polylines)
    canvas = Image.new("L", (size * _SUPERSAMPLE, size * _SUPERSAMPLE), 0)
    draw = ImageDraw.Draw(canvas)
    scale = size * _SUPERSAMPLE
    for pts, width in zip(polylines, widths):
        if not pts:
            continue
        px = [(x * scale, y * scale) for x, y in pts]
        w = max(1, int(round(width * _SUPERSAMPLE)))
        if len(px) == 1:
            x, y = px[0]
            r = w / 2.0
            draw.ellipse([x - r, y - r, x + r, y + r], fill=255)
            continue
        draw.line(px, fill=255, width=w, joint="curve")
        for x, y in (px[0], px[-1]):  # round caps
            r = w / 2.0
            draw.ellipse([x - r, y - r, x + r, y + r], fill=255)
    small = canvas.resize((size, size), Image.BOX)
    return np.asarray(small, dtype=np.float32) / 255.0


def _primitive_polyline(p: Primitive) -> list[tuple[float, float]]:
    if p.ptype is PrimitiveType.POINT:
        return sample_points(p, 2)[:1]
    n = _N_LINE if p.ptype is PrimitiveType.LINE else _N_CURVE
    return sample_points(p, n)


def _overshoot(pts: list[tuple[float, float]], amount: float) -> list[tuple[float, float]]:
    (x0, y0), (x1, y1) = pts[0], pts[1]
    d = math.hypot(x1 - x0, y1 - y0)
    if d == 0:
        return pts
    return [(x0 - (x1 - x0) / d * amount, y0 - (y1 - y0) / d * amount)] + pts


def rasterize(
    s: Sketch, noise: NoiseConfig | None = None, rng: np.random.Generator | None = None
) -> RasterImage:
    """Render a sketch; with a noise config, mimic a hand drawing."""
    polylines: list[list[tuple[float, float]]] = []
    widths: list[float] = []
    for p in s.primitives:
        pts = _primitive_polyline(p)
        width = _DEFAULT_WIDTH
        if noise is not None:
            if rng is None:
                raise ValueError("noisy rasterization needs an rng")
            width = float(rng.uniform(*noise.stroke_width))
            if p.ptype is not PrimitiveType.POINT:
                jitter = rng.normal(0.0, noise.raster_jitter / IMAGE_SIZE, size=(len(pts), 2))
                pts = [(x + dx, y + dy) for (x, y), (dx, dy) in zip(pts, jitter)]
                if p.ptype in (PrimitiveType.LINE, PrimitiveType.ARC):
                    for _ in range(2):
                        if rng.random() < noise.overshoot_prob:
                            amount = float(rng.uniform(0, noise.overshoot_max)) / IMAGE_SIZE
                            pts = _overshoot(pts, amount)
                        pts = pts[::-1]
        polylines.append(pts)
        widths.append(width)
    return render_polylines(polylines, widths)


def image_to_png_b64(img: RasterImage) -> str:
    arr = np.clip(np.rint(np.asarray(img) * 255.0), 0, 255).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(arr, mode="L").save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def image_from_png_b64(b64: str) -> RasterImage:
    raw = base64.b64decode(b64)
    return image_from_png_bytes(raw)


def image_from_png_bytes(raw: bytes) -> RasterImage:
    img = Image.open(io.BytesIO(raw)).convert("L")
    if img.size != (IMAGE_SIZE, IMAGE_SIZE):
        raise ValueError(f"expected {IMAGE_SIZE}x{IMAGE_SIZE} image, got {img.size[0]}x{img.size[1]}")
    return np.asarray(img, dtype=np.float32) / 255.0
