import { parseStrokes } from "./client.js";
import { exportPayload } from "./export.js";
import { buildOverlayModel } from "./overlay.js";
import type { OverlayModel } from "./overlay.js";
import { ParseScheduler } from "./scheduler.js";
import { StrokeStore } from "./strokes.js";
import type { ParseResponse } from "./types.js";

const SERVICE_URL = (window as unknown as { SKETCH2CAD_URL?: string }).SKETCH2CAD_URL ?? "http://127.0.0.1:8000";

const canvas = document.getElementById("canvas") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const banner = document.getElementById("banner")!;
const constraintList = document.getElementById("constraints")!;
const snapToggle = document.getElementById("snap") as HTMLInputElement;
const exportBtn = document.getElementById("export") as HTMLButtonElement;
const undoBtn = document.getElementById("undo") as HTMLButtonElement;
const clearBtn = document.getElementById("clear") as HTMLButtonElement;

const store = new StrokeStore();
let lastResponse: ParseResponse | null = null;
let highlighted: Set<number> = new Set();
let drawing = false;

const scheduler = new ParseScheduler(
    (strokes) => parseStrokes(SERVICE_URL, strokes),
    (resp) => {
        if (resp !== null) lastResponse = resp;
        if (resp === null && store.isEmpty) lastResponse = null;
        banner.hidden = true;
        exportBtn.disabled = lastResponse === null;
        render();
    },
    () => {
        banner.hidden = false; // keep the last good parse on screen
        render();
    },
);

function resize() {
    const size = Math.min(canvas.parentElement!.clientWidth, 640);
    canvas.width = size;
    canvas.height = size;
    render();
}

function drawShape(model: OverlayModel) {
    const s = canvas.width;
    for (const item of model.shapes) {
        ctx.strokeStyle = item.color;
        ctx.fillStyle = item.color;
        ctx.lineWidth = highlighted.has(item.primitiveIndex) ? 4 : 2;
        ctx.setLineDash(item.flag ? [] : [6, 4]); // construction geometry dashed
        const sh = item.shape;
        ctx.beginPath();
        if (sh.kind === "segment") {
            ctx.moveTo(sh.x1 * s, sh.y1 * s);
            ctx.lineTo(sh.x2 * s, sh.y2 * s);
            ctx.stroke();
        } else if (sh.kind === "circle") {
            ctx.arc(sh.cx * s, sh.cy * s, sh.r * s, 0, 2 * Math.PI);
            ctx.stroke();
        } else if (sh.kind === "arc") {
            ctx.arc(sh.cx * s, sh.cy * s, sh.r * s, sh.start, sh.end, !sh.ccw);
            ctx.stroke();
        } else {
            ctx.arc(sh.x * s, sh.y * s, 3, 0, 2 * Math.PI);
            ctx.fill();
        }
    }
    ctx.setLineDash([]);
}

function renderConstraints(model: OverlayModel) {
    constraintList.textContent = "";
    model.constraints.forEach((row) => {
        const li = document.createElement("li");
        li.textContent = row.label;
        li.addEventListener("mouseenter", () => {
            highlighted = new Set(row.refs);
            render();
        });
        li.addEventListener("mouseleave", () => {
            highlighted = new Set();
            render();
        });
        constraintList.appendChild(li);
    });
}

function render() {
    const s = canvas.width;
    ctx.clearRect(0, 0, s, s);
    // raw strokes in light gray underneath the parse overlay
    ctx.strokeStyle = "#bbbbbb";
    ctx.lineWidth = 2;
    ctx.setLineDash([]);
    for (const stroke of store.snapshot()) {
        if (stroke.length === 0) continue;
        ctx.beginPath();
        ctx.moveTo(stroke[0][0] * s, stroke[0][1] * s);
        for (const [x, y] of stroke.slice(1)) ctx.lineTo(x * s, y * s);
        ctx.stroke();
    }
    if (lastResponse) {
        const model = buildOverlayModel(lastResponse, snapToggle.checked);
        drawShape(model);
        renderConstraints(model);
    } else {
        constraintList.textContent = "";
    }
}

canvas.addEventListener("pointerdown", (e) => {
    drawing = true;
    canvas.setPointerCapture(e.pointerId);
    store.begin(e.offsetX, e.offsetY, canvas.width, canvas.height);
    render();
});
canvas.addEventListener("pointermove", (e) => {
    if (!drawing) return;
    store.extend(e.offsetX, e.offsetY, canvas.width, canvas.height);
    render();
});
canvas.addEventListener("pointerup", () => {
    drawing = false;
    store.end();
    scheduler.update(store.snapshot());
    render();
});

undoBtn.addEventListener("click", () => {
    store.undo();
    scheduler.update(store.snapshot());
    render();
});
clearBtn.addEventListener("click", () => {
    store.clear();
    scheduler.update(store.snapshot());
    render();
});
snapToggle.addEventListener("change", render);

exportBtn.addEventListener("click", () => {
    if (!lastResponse) return;
    const blob = new Blob([exportPayload(lastResponse)], { type: "application/json" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "sketch.json";
    a.click();
    URL.revokeObjectURL(a.href);
});

window.addEventListener("resize", resize);
resize();
