import { execFileSync } from "node:child_process";

import { describe, expect, it } from "vitest";

import { exportPayload } from "../src/export.js";
import type { ParseResponse } from "../src/types.js";

const RESPONSE: ParseResponse = {
    primitives: [
        { type: "line", flag: true, params: [10, 10, 50, 10, 0, 0, 0] },
        { type: "point", flag: false, params: [50, 10, 0, 0, 0, 0, 0] },
    ],
    constraints: [
        { type: "horizontal", refs: [0] },
        { type: "coincident", refs: [0, 1] },
    ],
    snapped_primitives: [],
    timing_ms: 3.2,
};

describe("exportPayload", () => {
    it("contains exactly the sketch fields of the response", () => {
        const parsed = JSON.parse(exportPayload(RESPONSE));
        expect(Object.keys(parsed).sort()).toEqual(["constraints", "primitives"]);
        expect(parsed.primitives).toEqual(RESPONSE.primitives);
        expect(parsed.constraints).toEqual(RESPONSE.constraints);
    });

    it("round-trips through the sketch library deserializer", () => {
        const payload = exportPayload(RESPONSE);
        const script =
            "import sys; from sketch2cad.core import deserialize_sketch, serialize_sketch; " +
            "s = deserialize_sketch(sys.stdin.read()); print(serialize_sketch(s))";
        const out = execFileSync("python3", ["-c", script], { input: payload, encoding: "utf-8" });
        expect(JSON.parse(out)).toEqual(JSON.parse(payload));
    });
});
