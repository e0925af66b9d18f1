"""Floor-based quantization onto the grid, bin-center dequantization.

quantize(dequantize(q)) == q exactly for every level, and the real round
trip error is at most half a bin (1/128 on the default grid).
"""

from __future__ import annotations

import math

from ..errors import InvalidInputError
from .types import GRID, QuantGrid


def quantize(x: float, grid: QuantGrid = GRID) -> int:
    """Map a real in [0, 1] to its bin index; out-of-range values clamp."""
    if not math.isfinite(x):
        raise InvalidInputError(f"cannot quantize non-finite value {x!r}")
    q = math.floor(x * grid.levels)
    return min(max(q, 0), grid.levels - 1)


def dequantize(q: int, grid: QuantGrid = GRID) -> float:
    """Map a bin index to its bin center in (0, 1)."""
    if not 0 <= q < grid.levels:
        raise InvalidInputError(f"bin index {q} outside [0, {grid.levels - 1}]")
    return (q + 0.5) / grid.levels
