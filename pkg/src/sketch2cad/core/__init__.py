from .types import (
    CONSTRAINT_ARITY,
    CONSTRAINT_TYPES,
    CONSTRAINT_TYPE_INDEX,
    GRID,
    LIVE_SLOTS,
    N_PARAM_SLOTS,
    PRIMITIVE_TYPES,
    PRIMITIVE_TYPE_INDEX,
    SYMMETRIC_CONSTRAINTS,
    Constraint,
    ConstraintType,
    Primitive,
    PrimitiveType,
    QuantGrid,
    Sketch,
    canonicalize_constraint,
    make_constraint,
    make_primitive,
)
from .quantize import dequantize, quantize
from .geometry import (
    anchor_points,
    arc_angles,
    arc_points,
    circle_center_radius,
    circumcircle,
    is_sampleable,
    line_direction,
    line_endpoints,
    line_length,
    point_location,
    point_segment_distance,
    sample_float_params,
    sample_points,
)
from .serialize import deserialize_sketch, serialize_sketch, sketch_from_dict, sketch_to_dict
from .validate import TAU_GEO, Violation, is_valid, validate_sketch

__all__ = [
    "CONSTRAINT_ARITY",
    "CONSTRAINT_TYPES",
    "CONSTRAINT_TYPE_INDEX",
    "GRID",
    "LIVE_SLOTS",
    "N_PARAM_SLOTS",
    "PRIMITIVE_TYPES",
    "PRIMITIVE_TYPE_INDEX",
    "SYMMETRIC_CONSTRAINTS",
    "TAU_GEO",
    "Constraint",
    "ConstraintType",
    "Primitive",
    "PrimitiveType",
    "QuantGrid",
    "Sketch",
    "Violation",
    "anchor_points",
    "arc_angles",
    "arc_points",
    "canonicalize_constraint",
    "circle_center_radius",
    "circumcircle",
    "dequantize",
    "deserialize_sketch",
    "is_sampleable",
    "is_valid",
    "line_direction",
    "line_endpoints",
    "line_length",
    "make_constraint",
    "make_primitive",
    "point_location",
    "point_segment_distance",
    "quantize",
    "sample_float_params",
    "sample_points",
    "serialize_sketch",
    "sketch_from_dict",
    "sketch_to_dict",
    "validate_sketch",
]
