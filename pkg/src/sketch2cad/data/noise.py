"""Parameter-level noise used by the noisy training/testing regimes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import GRID, Primitive, PrimitiveType, Sketch, dequantize, quantize
from ..core.geometry import arc_is_degenerate
from ..errors import ConfigError


@dataclass(frozen=True)
class NoiseConfig:
    param_sigma: float = 1.5  # quantization steps
    raster_jitter: float = 0.8  # px
    stroke_width: tuple[float, float] = (1.0, 2.0)
    overshoot_prob: float = 0.3
    overshoot_max: float = 3.0  # px

    def __post_init__(self):
        if min(self.param_sigma, self.raster_jitter, self.overshoot_prob, self.overshoot_max) < 0:
            raise ConfigError("noise magnitudes must be non-negative")
        if self.stroke_width[0] <= 0 or self.stroke_width[1] < self.stroke_width[0]:
            raise ConfigError("stroke width range must be positive and ordered")


def _perturb_one(p: Primitive, sigma_steps: float, rng: np.random.Generator) -> Primitive:
    params = list(p.params)
    for s in p.live_slots:
        value = dequantize(params[s]) + rng.normal(0.0, sigma_steps / GRID.levels)
        q = quantize(min(max(value, 0.0), 1.0 - 1e-9))
        if p.ptype is PrimitiveType.CIRCLE and s == 6:
            q = max(q, 1)
        params[s] = q
    return Primitive(p.ptype, p.flag, tuple(params))


def perturb_primitives(s: Sketch, noise: NoiseConfig, rng: np.random.Generator) -> Sketch:
    """Gaussian noise on every live parameter slot, re-quantized and clamped.

    Types, flags, padding slots and the constraint list are untouched. Arcs
    that a draw would collinearize are re-drawn (a degenerate arc is not a
    representable sketch); after a few failures the original is kept.
    """
    out = []
    for p in s.primitives:
        cand = _perturb_one(p, noise.param_sigma, rng)
        if p.ptype is PrimitiveType.ARC:
            tries = 0
            while arc_is_degenerate(cand) and tries < 8:
                cand = _perturb_one(p, noise.param_sigma, rng)
                tries += 1
            if arc_is_degenerate(cand):
                cand = p
        out.append(cand)
    return Sketch(tuple(out), s.constraints)
