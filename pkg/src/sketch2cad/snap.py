"""Constraint-driven correction of primitive parameters.

Dequantizes the parameters, minimizes the summed squared constraint
residuals plus a proximity regularizer with damped Gauss-Newton, then
re-quantizes. Types and flags never change; a trust region keeps any
parameter within 6 quantization steps of its input so a wrong predicted
constraint cannot drag a correct primitive far. Inconsistent constraint
sets are fine: least squares finds the best compromise.
"""

from __future__ import annotations

import math

import numpy as np

from .core import (
    Constraint,
    ConstraintType,
    GRID,
    Primitive,
    PrimitiveType,
    dequantize,
    quantize,
)
from .core.geometry import arc_is_degenerate, circumcircle

PROXIMITY_MU = 0.05
TRUST_STEPS = 6.0
_FD_H = 1e-6


def _var_layout(prims: list[Primitive]) -> tuple[np.ndarray, list[dict[int, int]]]:
    """Initial dequantized vector plus per-primitive slot -> var index maps."""
    x0: list[float] = []
    maps: list[dict[int, int]] = []
    for p in prims:
        m: dict[int, int] = {}
        for s in p.live_slots:
            m[s] = len(x0)
            x0.append(dequantize(p.params[s]))
        maps.append(m)
    return np.asarray(x0), maps


class _Residuals:
    """Scalar residual terms for one sketch's constraint set."""

    def __init__(self, prims: list[Primitive], cons: list[Constraint], x0: np.ndarray, maps):
        self.prims = prims
        self.maps = maps
        self.terms: list = []
        for c in cons:
            if any(not 0 <= r < len(prims) for r in c.refs):
                continue
            self._add_terms(c, x0)

    def _anchor_vars(self, i: int) -> list[tuple[int, int]]:
        p, m = self.prims[i], self.maps[i]
        if p.ptype is PrimitiveType.LINE:
            return [(m[0], m[1]), (m[2], m[3])]
        if p.ptype is PrimitiveType.ARC:
            return [(m[0], m[1]), (m[4], m[5])]
        return [(m[0], m[1])]

    def _line_vars(self, i: int):
        m = self.maps[i]
        return m[0], m[1], m[2], m[3]

    def _radius_of(self, i: int, x: np.ndarray) -> float:
        p, m = self.prims[i], self.maps[i]
        if p.ptype is PrimitiveType.CIRCLE:
            return x[m[6]]
        a = (x[m[0]], x[m[1]])
        mid = (x[m[2]], x[m[3]])
        b = (x[m[4]], x[m[5]])
        try:
            return circumcircle(a, mid, b)[1]
        except Exception:
            return 0.0

    def _add_terms(self, c: Constraint, x0: np.ndarray):
        prims = self.prims
        t = c.ctype

        if t in (ConstraintType.HORIZONTAL, ConstraintType.VERTICAL):
            (i,) = c.refs
            if prims[i].ptype is not PrimitiveType.LINE:
                return
            ax, ay, bx, by = self._line_vars(i)
            if t is ConstraintType.HORIZONTAL:
                self.terms.append(lambda x, ay=ay, by=by: x[ay] - x[by])
            else:
                self.terms.append(lambda x, ax=ax, bx=bx: x[ax] - x[bx])
            return

        i, j = c.refs
        a, b = prims[i], prims[j]

        if t is ConstraintType.COINCIDENT:
            pairs = [(u, v) for u in self._anchor_vars(i) for v in self._anchor_vars(j)]
            # Bind the anchor pair closest at input and keep it fixed.
            (ux, uy), (vx, vy) = min(
                pairs, key=lambda pv: math.hypot(x0[pv[0][0]] - x0[pv[1][0]], x0[pv[0][1]] - x0[pv[1][1]])
            )
            self.terms.append(lambda x, ux=ux, vx=vx: x[ux] - x[vx])
            self.terms.append(lambda x, uy=uy, vy=vy: x[uy] - x[vy])
            return

        if t in (ConstraintType.PARALLEL, ConstraintType.PERPENDICULAR):
            if a.ptype is not PrimitiveType.LINE or b.ptype is not PrimitiveType.LINE:
                return
            va, vb = self._line_vars(i), self._line_vars(j)

            def term(x, va=va, vb=vb, perp=(t is ConstraintType.PERPENDICULAR)):
                dax, day = x[va[2]] - x[va[0]], x[va[3]] - x[va[1]]
                dbx, dby = x[vb[2]] - x[vb[0]], x[vb[3]] - x[vb[1]]
                na, nb = math.hypot(dax, day), math.hypot(dbx, dby)
                if na == 0 or nb == 0:
                    return 0.0
                if perp:
                    return (dax * dbx + day * dby) / (na * nb)
                return (dax * dby - day * dbx) / (na * nb)

            self.terms.append(term)
            return

        if t is ConstraintType.TANGENT:
            line_i = i if a.ptype is PrimitiveType.LINE else (j if b.ptype is PrimitiveType.LINE else None)
            curve_i = j if line_i == i else i
            if line_i is None or prims[curve_i].ptype not in (PrimitiveType.CIRCLE, PrimitiveType.ARC):
                return
            lv = self._line_vars(line_i)
            cm = self.maps[curve_i]
            if prims[curve_i].ptype is not PrimitiveType.CIRCLE:
                return  # arc tangency left alone; radius is not a free slot

            def term(x, lv=lv, cm=cm):
                ax, ay, bx, by = x[lv[0]], x[lv[1]], x[lv[2]], x[lv[3]]
                cx, cy, r = x[cm[0]], x[cm[1]], x[cm[6]]
                dx, dy = bx - ax, by - ay
                length = math.hypot(dx, dy)
                if length == 0:
                    return 0.0
                dist = abs(dx * (cy - ay) - dy * (cx - ax)) / length
                return dist - r

            self.terms.append(term)
            return

        if t is ConstraintType.EQUAL:
            if a.ptype is PrimitiveType.LINE and b.ptype is PrimitiveType.LINE:
                va, vb = self._line_vars(i), self._line_vars(j)

                def term(x, va=va, vb=vb):
                    la = math.hypot(x[va[2]] - x[va[0]], x[va[3]] - x[va[1]])
                    lb = math.hypot(x[vb[2]] - x[vb[0]], x[vb[3]] - x[vb[1]])
                    return la - lb

                self.terms.append(term)
            elif a.ptype is PrimitiveType.CIRCLE and b.ptype is PrimitiveType.CIRCLE:
                ra, rb = self.maps[i][6], self.maps[j][6]
                self.terms.append(lambda x, ra=ra, rb=rb: x[ra] - x[rb])
            return

        if t is ConstraintType.MIDPOINT:
            if a.ptype is not PrimitiveType.POINT or b.ptype is not PrimitiveType.LINE:
                return
            pm = self.maps[i]
            lv = self._line_vars(j)
            self.terms.append(lambda x, pm=pm, lv=lv: x[pm[0]] - (x[lv[0]] + x[lv[2]]) / 2.0)
            self.terms.append(lambda x, pm=pm, lv=lv: x[pm[1]] - (x[lv[1]] + x[lv[3]]) / 2.0)
            return

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.array([f(x) for f in self.terms]) if self.terms else np.zeros(0)

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        n = len(x)
        jac = np.zeros((len(self.terms), n))
        for k in range(n):
            xp, xm = x.copy(), x.copy()
            xp[k] += _FD_H
            xm[k] -= _FD_H
            jac[:, k] = (self(xp) - self(xm)) / (2.0 * _FD_H)
        return jac


def apply_constraints(
    prims: list[Primitive], cons: list[Constraint], iters: int = 20, mu: float = PROXIMITY_MU
) -> list[Primitive]:
    """Least-squares snap of primitive parameters toward their constraints."""
    if not prims or not cons:
        return list(prims)
    x0, maps = _var_layout(prims)
    res = _Residuals(list(prims), list(cons), x0, maps)
    if not res.terms:
        return list(prims)

    lo = x0 - TRUST_STEPS / GRID.levels
    hi = x0 + TRUST_STEPS / GRID.levels

    def objective(x: np.ndarray) -> float:
        r = res(x)
        return float(r @ r + mu * ((x - x0) @ (x - x0)))

    x = x0.copy()
    lam = 1e-6
    for _ in range(iters):
        r = res(x)
        jac = res.jacobian(x)
        grad = jac.T @ r + mu * (x - x0)
        if np.linalg.norm(grad) < 1e-12:
            break
        h = jac.T @ jac + (mu + lam) * np.eye(len(x))
        try:
            step = np.linalg.solve(h, -grad)
        except np.linalg.LinAlgError:
            step = -0.1 * grad
        cand = np.clip(x + step, lo, hi)
        if objective(cand) <= objective(x):
            x = cand
            lam = max(lam / 2.0, 1e-9)
        else:
            lam = min(lam * 10.0, 1e3)

    out: list[Primitive] = []
    for p, m in zip(prims, maps):
        params = list(p.params)
        for s, k in m.items():
            q = quantize(min(max(float(x[k]), 0.0), 1.0 - 1e-9))
            if p.ptype is PrimitiveType.CIRCLE and s == 6:
                q = max(q, 1)
            params[s] = q
        cand = Primitive(p.ptype, p.flag, tuple(params))
        # Snapping must not manufacture a degenerate arc.
        if p.ptype is PrimitiveType.ARC and arc_is_degenerate(cand):
            cand = p
        out.append(cand)
    return out
