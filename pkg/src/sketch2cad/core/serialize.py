"""Canonical sketch JSON: lossless round trip, validated on the way in."""

from __future__ import annotations

import json
from typing import Any

from ..errors import InvalidInputError, ParseError
from .types import Constraint, ConstraintType, N_PARAM_SLOTS, Primitive, PrimitiveType, Sketch
from .validate import validate_sketch

_PRIM_BY_NAME = {t.value: t for t in PrimitiveType if t is not PrimitiveType.NONE}
_CONS_BY_NAME = {t.value: t for t in ConstraintType if t is not ConstraintType.NONE}


def sketch_to_dict(s: Sketch) -> dict[str, Any]:
    return {
        "primitives": [
            {"type": p.ptype.value, "flag": bool(p.flag), "params": list(p.params)} for p in s.primitives
        ],
        "constraints": [{"type": c.ctype.value, "refs": list(c.refs)} for c in s.constraints],
    }


def serialize_sketch(s: Sketch) -> str:
    return json.dumps(sketch_to_dict(s), separators=(",", ":"))


def _require(cond: bool, message: str):
    if not cond:
        raise ParseError(message)


def sketch_from_dict(obj: Any) -> Sketch:
    _require(isinstance(obj, dict), "sketch must be a JSON object")
    _require("primitives" in obj, "missing 'primitives' field")
    prims = []
    for i, rec in enumerate(obj["primitives"]):
        _require(isinstance(rec, dict), f"primitive {i} must be an object")
        name = rec.get("type")
        if name not in _PRIM_BY_NAME:
            raise ParseError(f"primitive {i}: unknown type {name!r}")
        params = rec.get("params")
        _require(
            isinstance(params, list) and len(params) == N_PARAM_SLOTS,
            f"primitive {i}: params must be a list of {N_PARAM_SLOTS} integers",
        )
        _require(all(isinstance(v, int) and not isinstance(v, bool) for v in params),
                 f"primitive {i}: params must be integers")
        flag = rec.get("flag")
        _require(isinstance(flag, bool), f"primitive {i}: flag must be a boolean")
        prims.append(Primitive(_PRIM_BY_NAME[name], flag, tuple(params)))
    cons = []
    for k, rec in enumerate(obj.get("constraints", [])):
        _require(isinstance(rec, dict), f"constraint {k} must be an object")
        name = rec.get("type")
        if name not in _CONS_BY_NAME:
            raise ParseError(f"constraint {k}: unknown type {name!r}")
        refs = rec.get("refs")
        _require(isinstance(refs, list) and refs and all(isinstance(r, int) for r in refs),
                 f"constraint {k}: refs must be a non-empty list of integers")
        cons.append(Constraint(_CONS_BY_NAME[name], tuple(refs)))
    return Sketch(tuple(prims), tuple(cons))


def deserialize_sketch(text: str) -> Sketch:
    """Parse and validate canonical sketch JSON."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", position=e.pos) from e
    s = sketch_from_dict(obj)
    violations = validate_sketch(s)
    if violations:
        detail = "; ".join(str(v) for v in violations[:5])
        raise InvalidInputError(f"sketch fails validation: {detail}")
    return s
