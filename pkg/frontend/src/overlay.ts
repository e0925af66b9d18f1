import { dequantize } from "./types.js";
import type { ParseResponse, PrimitiveJson } from "./types.js";

/** Drawable shapes in unit-square coordinates; scale by canvas size to draw. */
export type Shape =
    | { kind: "segment"; x1: number; y1: number; x2: number; y2: number }
    | { kind: "circle"; cx: number; cy: number; r: number }
    | { kind: "arc"; cx: number; cy: number; r: number; start: number; end: number; ccw: boolean }
    | { kind: "dot"; x: number; y: number };

export interface OverlayShape {
    primitiveIndex: number;
    ptype: PrimitiveJson["type"];
    flag: boolean;
    color: string;
    shape: Shape;
}

export interface ConstraintRow {
    label: string;
    refs: number[];
}

export interface OverlayModel {
    shapes: OverlayShape[];
    constraints: ConstraintRow[];
    snapped: boolean;
}

export const TYPE_COLORS: Record<PrimitiveJson["type"], string> = {
    line: "#1f77b4",
    circle: "#2ca02c",
    arc: "#d62728",
    point: "#9467bd",
};

function circumcircle(
    ax: number, ay: number, bx: number, by: number, cx: number, cy: number,
): { x: number; y: number; r: number } | null {
    const d = 2 * ((bx - ax) * (cy - ay) - (by - ay) * (cx - ax));
    if (Math.abs(d) < 1e-12) return null;
    const a2 = ax * ax + ay * ay;
    const b2 = bx * bx + by * by;
    const c2 = cx * cx + cy * cy;
    const ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
    const uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
    return { x: ux, y: uy, r: Math.hypot(ax - ux, ay - uy) };
}

function primitiveShape(p: PrimitiveJson): Shape {
    const q = p.params.map(dequantize);
    switch (p.type) {
        case "line":
            return { kind: "segment", x1: q[0], y1: q[1], x2: q[2], y2: q[3] };
        case "circle":
            return { kind: "circle", cx: q[0], cy: q[1], r: q[6] };
        case "point":
            return { kind: "dot", x: q[0], y: q[1] };
        case "arc": {
            const c = circumcircle(q[0], q[1], q[2], q[3], q[4], q[5]);
            if (!c) {
                // collinear control points: degrade to the chord
                return { kind: "segment", x1: q[0], y1: q[1], x2: q[4], y2: q[5] };
            }
            const angA = Math.atan2(q[1] - c.y, q[0] - c.x);
            const angM = Math.atan2(q[3] - c.y, q[2] - c.x);
            const angB = Math.atan2(q[5] - c.y, q[4] - c.x);
            const tau = 2 * Math.PI;
            const fwd = (u: number, v: number) => (((v - u) % tau) + tau) % tau;
            const ccw = fwd(angA, angM) > fwd(angA, angB);
            return { kind: "arc", cx: c.x, cy: c.y, r: c.r, start: angA, end: angB, ccw };
        }
    }
}

/**
 * Pure render model of the latest parse: which primitive list to draw
 * (snapped when requested and available) and the constraint rows. Never
 * mutates the response.
 */
export function buildOverlayModel(response: ParseResponse, snapOn: boolean): OverlayModel {
    const useSnapped = snapOn && Array.isArray(response.snapped_primitives);
    const prims = useSnapped ? response.snapped_primitives! : response.primitives;
    const shapes = prims.map((p, i) => ({
        primitiveIndex: i,
        ptype: p.type,
        flag: p.flag,
        color: TYPE_COLORS[p.type],
        shape: primitiveShape(p),
    }));
    const constraints = response.constraints.map((c) => ({
        label: `${c.type}(${c.refs.join(", ")})`,
        refs: [...c.refs],
    }));
    return { shapes, constraints, snapped: useSnapped };
}
