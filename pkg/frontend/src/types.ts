/** Wire types mirroring the inference service's /parse response. */

export type Point = [number, number];
export type Stroke = Point[];

export interface PrimitiveJson {
    type: "line" | "circle" | "arc" | "point";
    flag: boolean;
    params: number[]; // 7 quantized slots in [0, 63]
}

export interface ConstraintJson {
    type: string;
    refs: number[]; // primitive indices
}

export interface ParseResponse {
    primitives: PrimitiveJson[];
    constraints: ConstraintJson[];
    snapped_primitives?: PrimitiveJson[];
    timing_ms: number;
}

export const GRID_LEVELS = 64;

/** Bin index -> bin-center coordinate in the unit square. */
export function dequantize(q: number): number {
    return (q + 0.5) / GRID_LEVELS;
}
