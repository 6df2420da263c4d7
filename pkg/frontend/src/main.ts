// Chalkboard wiring: draw attacker strokes, drag defender stubs, submit to
// the service, scrub through the returned defender trajectories.

import { Point } from "./geometry.js";
import { PredictionClient, PredictionResponse, ServiceError } from "./client.js";
import { ModelInfo, N_PLAYERS, PlaySketch, buildScenarioRequest, emptySketch, validateSketch } from "./sketch.js";
import { CANVAS_H, CANVAS_W, Overlay, drawScene, toPitch } from "./render.js";

const app = document.getElementById("app")!;
app.innerHTML = `
  <div id="toolbar">
    <label>Model <select id="model"></select></label>
    <button id="mode-attacker">Draw attacker (<span id="att-count">0</span>/${N_PLAYERS})</button>
    <button id="mode-ball">Draw ball</button>
    <button id="mode-defender">Drag defenders</button>
    <button id="undo">Undo stroke</button>
    <button id="clear">Clear</button>
    <button id="submit" disabled>Predict defence</button>
    <label id="scrub-label">t <input type="range" id="scrub" min="0" max="40" value="0" disabled>
      <span id="scrub-t">0.0s</span></label>
  </div>
  <div id="banner" hidden></div>
  <canvas id="board" width="${CANVAS_W}" height="${CANVAS_H}"></canvas>
  <p id="hint">Draw one stroke per attacker (red), optionally the ball (yellow),
  drag the blue defender stubs, then request the predicted defence. Brown dots are
  the model's sparse control points.</p>
`;

const canvas = document.getElementById("board") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const banner = document.getElementById("banner")!;
const submitBtn = document.getElementById("submit") as HTMLButtonElement;
const scrub = document.getElementById("scrub") as HTMLInputElement;
const scrubT = document.getElementById("scrub-t")!;
const modelSelect = document.getElementById("model") as HTMLSelectElement;
const attCount = document.getElementById("att-count")!;

const client = new PredictionClient("");
let sketch: PlaySketch = emptySketch();
let models: ModelInfo[] = [];
let mode: "attacker" | "ball" | "defender" = "attacker";
let activeStroke: Point[] | null = null;
let dragIndex = -1;
const overlay: Overlay = { current: null, previous: null, playbackStep: 0 };

function currentModel(): ModelInfo | null {
  return models.find((m) => m.id === modelSelect.value) ?? null;
}

function redraw() {
  drawScene(ctx, sketch, overlay);
  attCount.textContent = String(sketch.attackerStrokes.length);
  const model = currentModel();
  submitBtn.disabled = model === null || validateSketch(sketch, model.spec).length > 0;
}

function showBanner(text: string, retryable: boolean) {
  banner.hidden = false;
  banner.textContent = retryable ? `${text} — edit or retry` : text;
}

function clearBanner() {
  banner.hidden = true;
}

function pointer(ev: PointerEvent): Point {
  const rect = canvas.getBoundingClientRect();
  return toPitch({ x: ev.clientX - rect.left, y: ev.clientY - rect.top });
}

canvas.addEventListener("pointerdown", (ev) => {
  const p = pointer(ev);
  if (mode === "defender") {
    let best = -1;
    let bestDist = 3; // meters of grab slack
    sketch.defenderAnchors.forEach((a, i) => {
      const d = Math.hypot(a.x - p.x, a.y - p.y);
      if (d < bestDist) {
        best = i;
        bestDist = d;
      }
    });
    dragIndex = best;
  } else {
    activeStroke = [p];
  }
  canvas.setPointerCapture(ev.pointerId);
});

canvas.addEventListener("pointermove", (ev) => {
  if (activeStroke) {
    activeStroke.push(pointer(ev));
    drawScene(ctx, { ...sketch, ballStroke: mode === "ball" ? activeStroke : sketch.ballStroke, attackerStrokes: mode === "attacker" ? [...sketch.attackerStrokes, activeStroke] : sketch.attackerStrokes }, overlay);
  } else if (dragIndex >= 0) {
    sketch.defenderAnchors[dragIndex] = pointer(ev);
    redraw();
  }
});

canvas.addEventListener("pointerup", () => {
  if (activeStroke) {
    if (activeStroke.length < 2) {
      showBanner("stroke too short — draw a longer path", false);
    } else if (mode === "attacker") {
      if (sketch.attackerStrokes.length < N_PLAYERS) {
        sketch.attackerStrokes.push(activeStroke);
        clearBanner();
      } else {
        showBanner(`already have ${N_PLAYERS} attackers — undo one first`, false);
      }
    } else if (mode === "ball") {
      sketch.ballStroke = activeStroke;
      clearBanner();
    }
    activeStroke = null;
  }
  dragIndex = -1;
  redraw();
});

function setMode(next: typeof mode) {
  mode = next;
  for (const id of ["mode-attacker", "mode-ball", "mode-defender"]) {
    document.getElementById(id)!.classList.toggle("active", id === `mode-${next}`);
  }
}

document.getElementById("mode-attacker")!.addEventListener("click", () => setMode("attacker"));
document.getElementById("mode-ball")!.addEventListener("click", () => setMode("ball"));
document.getElementById("mode-defender")!.addEventListener("click", () => setMode("defender"));

document.getElementById("undo")!.addEventListener("click", () => {
  sketch.attackerStrokes.pop();
  redraw();
});

document.getElementById("clear")!.addEventListener("click", () => {
  sketch = emptySketch();
  sketch.modelId = modelSelect.value || null;
  overlay.current = overlay.previous = null;
  scrub.disabled = true;
  redraw();
});

scrub.addEventListener("input", () => {
  overlay.playbackStep = Number(scrub.value);
  const model = currentModel();
  const hz = model?.frame_rate_hz ?? 10;
  scrubT.textContent = `${(overlay.playbackStep / hz).toFixed(1)}s`;
  redraw();
});

async function submit() {
  const model = currentModel();
  if (!model) return;
  sketch.modelId = model.id;
  const body = buildScenarioRequest(sketch, model.spec);
  const token = client.nextToken();
  submitBtn.disabled = true;
  try {
    const response: PredictionResponse = await client.predictConditioned(body, token);
    if (!client.isCurrent(token)) return; // a newer request superseded this one
    overlay.previous = overlay.current; // keep the prior attempt for comparison
    overlay.current = response;
    overlay.playbackStep = 0;
    scrub.max = String(response.horizon);
    scrub.value = "0";
    scrub.disabled = false;
    clearBanner();
  } catch (err) {
    if (err instanceof ServiceError) {
      const fields = err.details.map((d) => (d.field ? `${d.field}: ${d.message}` : d.message));
      showBanner(fields.length ? `${err.message}: ${fields.join("; ")}` : err.message, err.retryable);
    } else {
      showBanner(String(err), true);
    }
  } finally {
    submitBtn.disabled = false;
    redraw();
  }
}

submitBtn.addEventListener("click", () => void submit());
modelSelect.addEventListener("change", () => {
  overlay.current = overlay.previous = null; // model switch invalidates overlays
  redraw();
  if (!submitBtn.disabled) void submit(); // re-query with the new model
});

async function boot() {
  try {
    models = (await client.listModels()).filter((m) => m.spec.conditioned);
    if (models.length === 0) {
      showBanner("service has no full-trajectory-conditioned model loaded", false);
    }
    modelSelect.innerHTML = models
      .map((m) => `<option value="${m.id}">${m.id} (${m.spec.horizon} steps)</option>`)
      .join("");
  } catch (err) {
    showBanner(`cannot reach prediction service: ${String(err)}`, true);
  }
  setMode("attacker");
  redraw();
}

void boot();
