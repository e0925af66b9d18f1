import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ParseScheduler } from "../src/scheduler.js";
import type { ParseResponse, Stroke } from "../src/types.js";

function response(tag: number): ParseResponse {
    return { primitives: [], constraints: [], timing_ms: tag };
}

const STROKES_A: Stroke[] = [[[0.1, 0.1], [0.2, 0.2]]];
const STROKES_B: Stroke[] = [[[0.1, 0.1], [0.2, 0.2]], [[0.5, 0.5], [0.6, 0.6]]];

describe("ParseScheduler", () => {
    beforeEach(() => vi.useFakeTimers());
    afterEach(() => vi.useRealTimers());

    it("debounces: many updates inside the window produce one request", async () => {
        const calls: Stroke[][] = [];
        const results: (ParseResponse | null)[] = [];
        const sched = new ParseScheduler(
            async (s) => {
                calls.push(s);
                return response(calls.length);
            },
            (r) => results.push(r),
            () => {},
        );
        for (let i = 0; i < 5; i++) {
            sched.update(STROKES_A);
            vi.advanceTimersByTime(100); // under the 300 ms idle threshold
        }
        expect(calls).toHaveLength(0);
        await vi.advanceTimersByTimeAsync(300);
        expect(calls).toHaveLength(1);
        expect(results).toHaveLength(1);
    });

    it("fires only after 300 ms of inactivity", async () => {
        const calls: Stroke[][] = [];
        const sched = new ParseScheduler(
            async (s) => {
                calls.push(s);
                return response(0);
            },
            () => {},
            () => {},
        );
        sched.update(STROKES_A);
        await vi.advanceTimersByTimeAsync(299);
        expect(calls).toHaveLength(0);
        await vi.advanceTimersByTimeAsync(1);
        expect(calls).toHaveLength(1);
    });

    it("keeps a single request in flight and drops the stale response", async () => {
        const resolvers: ((r: ParseResponse) => void)[] = [];
        const seen: Stroke[][] = [];
        const delivered: (ParseResponse | null)[] = [];
        const sched = new ParseScheduler(
            (s) => {
                seen.push(s);
                return new Promise((resolve) => resolvers.push(resolve));
            },
            (r) => delivered.push(r),
            () => {},
        );
        sched.update(STROKES_A);
        await vi.advanceTimersByTimeAsync(300);
        expect(seen).toHaveLength(1);

        // new strokes while the first request is still in flight
        sched.update(STROKES_B);
        await vi.advanceTimersByTimeAsync(300);
        expect(seen).toHaveLength(1); // still only one in flight

        resolvers[0](response(1)); // stale: must not be delivered
        await vi.advanceTimersByTimeAsync(0);
        expect(delivered).toHaveLength(0);
        expect(seen).toHaveLength(2); // newest strokes were re-requested
        expect(seen[1]).toEqual(STROKES_B);

        resolvers[1](response(2));
        await vi.advanceTimersByTimeAsync(0);
        expect(delivered).toEqual([response(2)]);
    });

    it("clears without a request when strokes are empty", async () => {
        const calls: Stroke[][] = [];
        const delivered: (ParseResponse | null)[] = [];
        const sched = new ParseScheduler(
            async (s) => {
                calls.push(s);
                return response(0);
            },
            (r) => delivered.push(r),
            () => {},
        );
        sched.update([]);
        await vi.advanceTimersByTimeAsync(1000);
        expect(calls).toHaveLength(0);
        expect(delivered).toEqual([null]);
    });

    it("routes failures to the error handler", async () => {
        const errors: unknown[] = [];
        const sched = new ParseScheduler(
            async () => {
                throw new Error("boom");
            },
            () => {},
            (e) => errors.push(e),
        );
        sched.update(STROKES_A);
        await vi.advanceTimersByTimeAsync(300);
        expect(errors).toHaveLength(1);
    });

    it("dispose cancels pending work", async () => {
        const calls: Stroke[][] = [];
        const sched = new ParseScheduler(
            async (s) => {
                calls.push(s);
                return response(0);
            },
            () => {},
            () => {},
        );
        sched.update(STROKES_A);
        sched.dispose();
        await vi.advanceTimersByTimeAsync(1000);
        expect(calls).toHaveLength(0);
    });
});
