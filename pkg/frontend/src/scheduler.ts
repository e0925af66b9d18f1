import type { ParseResponse, Stroke } from "./types.js";

/**
 * Debounced, single-in-flight parse scheduling.
 *
 * A request fires after `debounceMs` of inactivity. At most one request is
 * ever in flight; if strokes change while one is pending, its response is
 * discarded on arrival and the newest stroke set is parsed instead. An
 * empty stroke set clears the result without touching the service.
 */
export class ParseScheduler {
    requestCount = 0;

    private timer: ReturnType<typeof setTimeout> | null = null;
    private generation = 0;
    private inFlight = false;
    private starved = false;
    private latest: Stroke[] | null = null;

    constructor(
        private readonly run: (strokes: Stroke[]) => Promise<ParseResponse>,
        private readonly onResult: (r: ParseResponse | null) => void,
        private readonly onError: (e: unknown) => void,
        private readonly debounceMs = 300,
    ) {}

    update(strokes: Stroke[]): void {
        this.generation += 1;
        if (this.timer) {
            clearTimeout(this.timer);
            this.timer = null;
        }
        if (strokes.length === 0) {
            this.latest = null;
            this.onResult(null);
            return;
        }
        this.latest = strokes;
        this.timer = setTimeout(() => {
            this.timer = null;
            this.maybeLaunch();
        }, this.debounceMs);
    }

    dispose(): void {
        if (this.timer) clearTimeout(this.timer);
        this.timer = null;
        this.latest = null;
        this.generation += 1;
    }

    private maybeLaunch(): void {
        if (!this.latest) return;
        if (this.inFlight) {
            this.starved = true;
            return;
        }
        const gen = this.generation;
        this.inFlight = true;
        this.requestCount += 1;
        this.run(this.latest).then(
            (resp) => this.finish(gen, () => this.onResult(resp)),
            (err) => this.finish(gen, () => this.onError(err)),
        );
    }

    private finish(gen: number, deliver: () => void): void {
        this.inFlight = false;
        if (gen === this.generation) deliver();
        const rerun = this.starved;
        this.starved = false;
        // a pending timer re-triggers on its own; only relaunch when one
        // fired while we were busy
        if (rerun && !this.timer) this.maybeLaunch();
    }
}
