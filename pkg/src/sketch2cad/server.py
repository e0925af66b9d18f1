"""HTTP inference service for the two-stage pipeline.

POST /parse accepts either a base64 128x128 grayscale PNG or raw stroke
polylines (rasterized server-side with the noiseless renderer, so clients
never reimplement rasterization); GET /health reports checkpoint identity.
Loaded models are immutable, so concurrent requests are safe.
"""

from __future__ import annotations

import json

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .data import render_polylines
from .data.raster import image_from_png_b64
from .models.training import checkpoint_id
from . import pipeline

MAX_BODY_BYTES = 1 << 20  # 1 MiB


def _error(status: int, detail: str) -> JSONResponse:
    return JSONResponse({"detail": detail}, status_code=status)


def _parse_strokes(raw) -> list[list[tuple[float, float]]] | str:
    """Validated unit-square polylines, or an error message."""
    if not isinstance(raw, list) or not raw:
        return "strokes must be a non-empty list of polylines"
    strokes = []
    for stroke in raw:
        if not isinstance(stroke, list) or not stroke:
            return "each stroke must be a non-empty list of [x, y] points"
        pts = []
        for pt in stroke:
            if not isinstance(pt, (list, tuple)) or len(pt) != 2:
                return "stroke points must be [x, y] pairs"
            x, y = pt
            if not isinstance(x, (int, float)) or not isinstance(y, (int, float)):
                return "stroke coordinates must be numbers"
            if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
                return "stroke coordinates must lie in the unit square"
            pts.append((float(x), float(y)))
        strokes.append(pts)
    return strokes


def create_app(prim_ckpt: str | None = None, cons_ckpt: str | None = None) -> FastAPI:
    app = FastAPI(title="sketch2cad inference")
    state = app.state
    state.prim_model = None
    state.cons_model = None
    state.prim_ckpt_id = None
    state.cons_ckpt_id = None

    if prim_ckpt is not None and cons_ckpt is not None:
        state.prim_model = pipeline.load_primitive_model(prim_ckpt)
        state.cons_model = pipeline.load_constraint_model(cons_ckpt)
        state.prim_ckpt_id = checkpoint_id(prim_ckpt)
        state.cons_ckpt_id = checkpoint_id(cons_ckpt)

    @app.get("/health")
    def health():
        if state.prim_model is None or state.cons_model is None:
            return _error(503, "models not loaded")
        return {
            "status": "ok",
            "prim_ckpt_id": state.prim_ckpt_id,
            "cons_ckpt_id": state.cons_ckpt_id,
        }

    @app.post("/parse")
    async def parse(request: Request, snap: bool = False):
        if state.prim_model is None or state.cons_model is None:
            return _error(503, "models not loaded")
        body = await request.body()
        if len(body) > MAX_BODY_BYTES:
            return _error(413, f"payload exceeds {MAX_BODY_BYTES} bytes")
        try:
            payload = json.loads(body)
        except json.JSONDecodeError:
            return _error(400, "body must be valid JSON")
        if not isinstance(payload, dict):
            return _error(400, "body must be a JSON object")

        has_image = "image_png_b64" in payload
        has_strokes = "strokes" in payload
        if has_image == has_strokes:
            return _error(400, "provide exactly one of image_png_b64 or strokes")

        if has_image:
            try:
                image = image_from_png_b64(payload["image_png_b64"])
            except Exception as e:
                return _error(400, f"bad image: {e}")
        else:
            strokes = _parse_strokes(payload["strokes"])
            if isinstance(strokes, str):
                return _error(400, strokes)
            image = render_polylines(strokes)

        return pipeline.parse_image(np.asarray(image), state.prim_model, state.cons_model, snap=snap)

    return app
