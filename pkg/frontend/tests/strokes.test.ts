import { describe, expect, it } from "vitest";

import { StrokeStore } from "../src/strokes.js";

describe("StrokeStore", () => {
    it("captures one drag as one stroke", () => {
        const store = new StrokeStore();
        store.begin(0, 0, 100, 100);
        store.extend(50, 50, 100, 100);
        store.extend(100, 100, 100, 100);
        store.end();
        const strokes = store.snapshot();
        expect(strokes).toHaveLength(1);
        expect(strokes[0]).toEqual([
            [0, 0],
            [0.5, 0.5],
            [1, 1],
        ]);
    });

    it("undo removes the last stroke only", () => {
        const store = new StrokeStore();
        store.begin(0, 0, 10, 10);
        store.end();
        store.begin(5, 5, 10, 10);
        store.end();
        expect(store.snapshot()).toHaveLength(2);
        store.undo();
        expect(store.snapshot()).toHaveLength(1);
        expect(store.snapshot()[0][0]).toEqual([0, 0]);
    });

    it("normalizes into the unit square regardless of canvas size", () => {
        const store = new StrokeStore();
        store.begin(320, 160, 640, 640);
        store.extend(640, 640, 640, 640);
        store.end();
        const [stroke] = store.snapshot();
        expect(stroke[0]).toEqual([0.5, 0.25]);
        expect(stroke[1]).toEqual([1, 1]);
        for (const [x, y] of stroke) {
            expect(x).toBeGreaterThanOrEqual(0);
            expect(x).toBeLessThanOrEqual(1);
            expect(y).toBeGreaterThanOrEqual(0);
            expect(y).toBeLessThanOrEqual(1);
        }
    });

    it("clamps out-of-canvas points", () => {
        const store = new StrokeStore();
        store.begin(-10, 20, 100, 100);
        store.extend(150, 20, 100, 100);
        store.end();
        const [stroke] = store.snapshot();
        expect(stroke[0][0]).toBe(0);
        expect(stroke[1][0]).toBe(1);
    });

    it("snapshot includes the in-progress stroke and is a deep copy", () => {
        const store = new StrokeStore();
        store.begin(0, 0, 10, 10);
        const snap = store.snapshot();
        expect(snap).toHaveLength(1);
        snap[0][0][0] = 99;
        expect(store.snapshot()[0][0][0]).toBe(0);
    });

    it("drops duplicate consecutive points", () => {
        const store = new StrokeStore();
        store.begin(5, 5, 10, 10);
        store.extend(5, 5, 10, 10);
        store.end();
        expect(store.snapshot()[0]).toHaveLength(1);
    });

    it("clear empties everything", () => {
        const store = new StrokeStore();
        store.begin(1, 1, 10, 10);
        store.end();
        store.clear();
        expect(store.isEmpty).toBe(true);
        expect(store.snapshot()).toEqual([]);
    });
});
