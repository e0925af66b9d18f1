"""Domain types: primitives, constraints, sketches, and the quantization grid.

All geometry lives on a 64-level grid over the unit square. A primitive
carries exactly 7 integer parameter slots; which slots are live depends on
its type (unused slots are zero padding). Constraints reference primitives
by index, one or two references depending on the constraint type.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class PrimitiveType(enum.Enum):
    LINE = "line"
    CIRCLE = "circle"
    ARC = "arc"
    POINT = "point"
    NONE = "none"  # no-object padding class; never stored in a valid Sketch


# Class-index order for prediction heads. NONE last so it doubles as the
# no-object class.
PRIMITIVE_TYPES: tuple[PrimitiveType, ...] = (
    PrimitiveType.LINE,
    PrimitiveType.CIRCLE,
    PrimitiveType.ARC,
    PrimitiveType.POINT,
    PrimitiveType.NONE,
)
PRIMITIVE_TYPE_INDEX = {t: i for i, t in enumerate(PRIMITIVE_TYPES)}

N_PARAM_SLOTS = 7

# Live parameter slots per type (Line: x1,y1,x2,y2 / Circle: cx,cy,..,r /
# Arc: three on-curve points start,mid,end / Point: x,y).
LIVE_SLOTS: dict[PrimitiveType, tuple[int, ...]] = {
    PrimitiveType.LINE: (0, 1, 2, 3),
    PrimitiveType.CIRCLE: (0, 1, 6),
    PrimitiveType.ARC: (0, 1, 2, 3, 4, 5),
    PrimitiveType.POINT: (0, 1),
    PrimitiveType.NONE: (),
}


class ConstraintType(enum.Enum):
    COINCIDENT = "coincident"
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"
    PARALLEL = "parallel"
    PERPENDICULAR = "perpendicular"
    TANGENT = "tangent"
    EQUAL = "equal"
    MIDPOINT = "midpoint"
    NONE = "none"  # padding class for prediction only


CONSTRAINT_TYPES: tuple[ConstraintType, ...] = (
    ConstraintType.COINCIDENT,
    ConstraintType.HORIZONTAL,
    ConstraintType.VERTICAL,
    ConstraintType.PARALLEL,
    ConstraintType.PERPENDICULAR,
    ConstraintType.TANGENT,
    ConstraintType.EQUAL,
    ConstraintType.MIDPOINT,
    ConstraintType.NONE,
)
CONSTRAINT_TYPE_INDEX = {t: i for i, t in enumerate(CONSTRAINT_TYPES)}

CONSTRAINT_ARITY: dict[ConstraintType, int] = {
    ConstraintType.COINCIDENT: 2,
    ConstraintType.HORIZONTAL: 1,
    ConstraintType.VERTICAL: 1,
    ConstraintType.PARALLEL: 2,
    ConstraintType.PERPENDICULAR: 2,
    ConstraintType.TANGENT: 2,
    ConstraintType.EQUAL: 2,
    ConstraintType.MIDPOINT: 2,
    ConstraintType.NONE: 0,
}

# Types whose two references are interchangeable; stored sorted ascending.
# Midpoint is ordered: (point index, segment index).
SYMMETRIC_CONSTRAINTS = frozenset(
    {
        ConstraintType.COINCIDENT,
        ConstraintType.PARALLEL,
        ConstraintType.PERPENDICULAR,
        ConstraintType.TANGENT,
        ConstraintType.EQUAL,
    }
)


@dataclass(frozen=True)
class QuantGrid:
    """6-bit quantization grid over [0, 1]."""

    bits: int = 6

    @property
    def levels(self) -> int:
        return 1 << self.bits


GRID = QuantGrid()


@dataclass(frozen=True)
class Primitive:
    """A typed sketch element with 7 quantized parameter slots."""

    ptype: PrimitiveType
    flag: bool
    params: tuple[int, ...]

    def __post_init__(self):
        if len(self.params) != N_PARAM_SLOTS:
            raise ValueError(f"expected {N_PARAM_SLOTS} parameter slots, got {len(self.params)}")
        object.__setattr__(self, "params", tuple(int(p) for p in self.params))

    @property
    def live_slots(self) -> tuple[int, ...]:
        return LIVE_SLOTS[self.ptype]

    def live_params(self) -> tuple[int, ...]:
        return tuple(self.params[s] for s in self.live_slots)


def make_primitive(ptype: PrimitiveType, flag: bool, live_values: list[int] | tuple[int, ...]) -> Primitive:
    """Build a primitive from just its live slot values, zero-padding the rest."""
    slots = LIVE_SLOTS[ptype]
    if len(live_values) != len(slots):
        raise ValueError(f"{ptype.value} takes {len(slots)} live parameters, got {len(live_values)}")
    params = [0] * N_PARAM_SLOTS
    for slot, value in zip(slots, live_values):
        params[slot] = int(value)
    return Primitive(ptype, bool(flag), tuple(params))


@dataclass(frozen=True)
class Constraint:
    """A typed relation whose parameters are primitive indices."""

    ctype: ConstraintType
    refs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "refs", tuple(int(r) for r in self.refs))


def canonicalize_constraint(c: Constraint) -> Constraint:
    """Sort the reference pair for symmetric types. Idempotent."""
    if c.ctype in SYMMETRIC_CONSTRAINTS and len(c.refs) == 2 and c.refs[0] > c.refs[1]:
        return Constraint(c.ctype, (c.refs[1], c.refs[0]))
    return c


def make_constraint(ctype: ConstraintType, *refs: int) -> Constraint:
    return canonicalize_constraint(Constraint(ctype, tuple(refs)))


@dataclass(frozen=True)
class Sketch:
    """An unordered (stored ordered) set of primitives plus constraints."""

    primitives: tuple[Primitive, ...]
    constraints: tuple[Constraint, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "primitives", tuple(self.primitives))
        object.__setattr__(self, "constraints", tuple(self.constraints))

    @property
    def n_primitives(self) -> int:
        return len(self.primitives)

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)
