from .generate import FloatPrimitive, GenConfig, generate_float_sketch, generate_sketch, quantize_float_primitive
from .noise import NoiseConfig, perturb_primitives
from .raster import (
    IMAGE_SIZE,
    RasterImage,
    image_from_png_b64,
    image_from_png_bytes,
    image_to_png_b64,
    rasterize,
    render_polylines,
)
from .corpus import Corpus, ImportResult, build_corpus, import_external

__all__ = [
    "Corpus",
    "FloatPrimitive",
    "GenConfig",
    "IMAGE_SIZE",
    "ImportResult",
    "NoiseConfig",
    "RasterImage",
    "build_corpus",
    "generate_float_sketch",
    "generate_sketch",
    "image_from_png_b64",
    "image_from_png_bytes",
    "image_to_png_b64",
    "import_external",
    "perturb_primitives",
    "quantize_float_primitive",
    "rasterize",
    "render_polylines",
]
