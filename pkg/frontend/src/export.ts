import type { ParseResponse } from "./types.js";

/**
 * Sketch-file payload for download: exactly the sketch fields of the last
 * service response, in the canonical sketch JSON format.
 */
export function exportPayload(response: ParseResponse): string {
    return JSON.stringify({
        primitives: response.primitives,
        constraints: response.constraints,
    });
}
