import type { Point, Stroke } from "./types.js";

/**
 * Stroke capture model. Pointer positions arrive in element pixels and are
 * stored normalized to the unit square (clamped), so the canvas size never
 * leaks into the data. One in-progress stroke at a time; undo drops the
 * most recent finished stroke.
 */
export class StrokeStore {
    private finished: Stroke[] = [];
    private active: Stroke | null = null;

    begin(x: number, y: number, width: number, height: number): void {
        this.active = [normalize(x, y, width, height)];
    }

    extend(x: number, y: number, width: number, height: number): void {
        if (!this.active) return;
        const pt = normalize(x, y, width, height);
        const last = this.active[this.active.length - 1];
        if (pt[0] !== last[0] || pt[1] !== last[1]) this.active.push(pt);
    }

    /** Finish the active stroke; single-point strokes are kept (dots). */
    end(): void {
        if (this.active && this.active.length > 0) this.finished.push(this.active);
        this.active = null;
    }

    undo(): void {
        this.finished.pop();
    }

    clear(): void {
        this.finished = [];
        this.active = null;
    }

    get isEmpty(): boolean {
        return this.finished.length === 0 && this.active === null;
    }

    /** Finished strokes plus the in-progress one, deep-copied. */
    snapshot(): Stroke[] {
        const all = this.active ? [...this.finished, this.active] : this.finished;
        return all.map((s) => s.map((p) => [p[0], p[1]] as Point));
    }
}

function clamp01(v: number): number {
    return Math.min(1, Math.max(0, v));
}

function normalize(x: number, y: number, width: number, height: number): Point {
    return [clamp01(x / width), clamp01(y / height)];
}
