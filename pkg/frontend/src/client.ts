import type { ParseResponse, Stroke } from "./types.js";

export type FetchLike = (url: string, init: RequestInit) => Promise<Response>;

/**
 * POST strokes to the service. Snapped geometry is always requested so the
 * snap toggle stays a pure client-side choice.
 */
export async function parseStrokes(
    baseUrl: string,
    strokes: Stroke[],
    fetchImpl: FetchLike = fetch,
): Promise<ParseResponse> {
    const resp = await fetchImpl(`${baseUrl}/parse?snap=true`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ strokes }),
    });
    if (!resp.ok) {
        throw new Error(`parse failed: HTTP ${resp.status}`);
    }
    return (await resp.json()) as ParseResponse;
}
