import { describe, expect, it } from "vitest";

import { buildOverlayModel, TYPE_COLORS } from "../src/overlay.js";
import type { ParseResponse } from "../src/types.js";

function sampleResponse(): ParseResponse {
    return {
        primitives: [
            { type: "line", flag: true, params: [10, 30, 50, 32, 0, 0, 0] },
            { type: "circle", flag: false, params: [32, 32, 0, 0, 0, 0, 10] },
        ],
        constraints: [{ type: "horizontal", refs: [0] }],
        snapped_primitives: [
            { type: "line", flag: true, params: [10, 31, 50, 31, 0, 0, 0] },
            { type: "circle", flag: false, params: [32, 32, 0, 0, 0, 0, 10] },
        ],
        timing_ms: 1.0,
    };
}

describe("buildOverlayModel", () => {
    it("toggles between raw and snapped primitives", () => {
        const resp = sampleResponse();
        const raw = buildOverlayModel(resp, false);
        const snapped = buildOverlayModel(resp, true);
        expect(raw.snapped).toBe(false);
        expect(snapped.snapped).toBe(true);
        const rawLine = raw.shapes[0].shape;
        const snapLine = snapped.shapes[0].shape;
        expect(rawLine.kind).toBe("segment");
        expect(snapLine.kind).toBe("segment");
        if (rawLine.kind === "segment" && snapLine.kind === "segment") {
            expect(rawLine.y1).not.toBe(rawLine.y2); // raw is tilted
            expect(snapLine.y1).toBe(snapLine.y2); // snapped is flat
        }
    });

    it("falls back to raw when snap requested but absent", () => {
        const resp = sampleResponse();
        delete resp.snapped_primitives;
        const model = buildOverlayModel(resp, true);
        expect(model.snapped).toBe(false);
        expect(model.shapes).toHaveLength(2);
    });

    it("never mutates the response", () => {
        const resp = sampleResponse();
        const frozen = JSON.parse(JSON.stringify(resp));
        buildOverlayModel(Object.freeze(resp) as ParseResponse, true);
        expect(resp).toEqual(frozen);
    });

    it("is a pure function of response and toggle", () => {
        const resp = sampleResponse();
        expect(buildOverlayModel(resp, true)).toEqual(buildOverlayModel(resp, true));
    });

    it("color-codes by primitive type", () => {
        const model = buildOverlayModel(sampleResponse(), false);
        expect(model.shapes[0].color).toBe(TYPE_COLORS.line);
        expect(model.shapes[1].color).toBe(TYPE_COLORS.circle);
    });

    it("keeps constraint refs for hover highlighting", () => {
        const model = buildOverlayModel(sampleResponse(), false);
        expect(model.constraints).toEqual([{ label: "horizontal(0)", refs: [0] }]);
    });

    it("decomposes arcs through the mid point", () => {
        const resp: ParseResponse = {
            primitives: [{ type: "arc", flag: true, params: [0, 32, 32, 63, 63, 32, 0] }],
            constraints: [],
            timing_ms: 0,
        };
        const { shapes } = buildOverlayModel(resp, false);
        const sh = shapes[0].shape;
        expect(sh.kind).toBe("arc");
        if (sh.kind === "arc") {
            expect(sh.cx).toBeCloseTo(0.5, 1);
            expect(sh.r).toBeCloseTo(0.5, 1);
        }
    });

    it("degrades collinear arcs to their chord", () => {
        const resp: ParseResponse = {
            primitives: [{ type: "arc", flag: true, params: [10, 10, 20, 20, 30, 30, 0] }],
            constraints: [],
            timing_ms: 0,
        };
        const { shapes } = buildOverlayModel(resp, false);
        expect(shapes[0].shape.kind).toBe("segment");
    });
});
