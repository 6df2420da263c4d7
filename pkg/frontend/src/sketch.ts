// The play sketch: attacker/ball strokes plus defender past stubs, and its
// conversion into a prediction request for the service.

import { Point, resampleStroke, withinPitch } from "./geometry.js";

export const N_PLAYERS = 11;
export const FRAME_RATE_HZ = 10;

export interface ServiceSpec {
  conditioned: boolean;
  horizon: number;
  input_len: number;
}

export interface ModelInfo {
  id: string;
  spec: ServiceSpec & Record<string, unknown>;
  frame_rate_hz: number;
}

export interface PlaySketch {
  attackerStrokes: Point[][]; // freehand, pitch meters
  ballStroke: Point[] | null; // defaults to the first attacker's stroke
  defenderAnchors: Point[]; // stationary past stubs, one per defender
  modelId: string | null;
  horizon: number | null; // null = model default
}

export function emptySketch(): PlaySketch {
  // defenders start on a 4-4-3-ish grid in their own half; all draggable
  const anchors: Point[] = [];
  const columns = [8, 20, 32, 44];
  const rows = [-22, 0, 22];
  outer: for (const x of columns) {
    for (const y of rows) {
      anchors.push({ x, y });
      if (anchors.length === N_PLAYERS) break outer;
    }
  }
  return {
    attackerStrokes: [],
    ballStroke: null,
    defenderAnchors: anchors,
    modelId: null,
    horizon: null,
  };
}

export interface ValidationIssue {
  field: string;
  message: string;
}

export function validateSketch(sketch: PlaySketch, spec: ServiceSpec): ValidationIssue[] {
  const issues: ValidationIssue[] = [];
  if (sketch.attackerStrokes.length !== N_PLAYERS) {
    issues.push({
      field: "attackers",
      message: `need ${N_PLAYERS} attacker strokes, have ${sketch.attackerStrokes.length}`,
    });
  }
  sketch.attackerStrokes.forEach((stroke, i) => {
    if (stroke.length < 2) {
      issues.push({ field: `attackers[${i}]`, message: "stroke too short to resample" });
    } else if (!stroke.every((p) => withinPitch(p))) {
      issues.push({ field: `attackers[${i}]`, message: "stroke leaves the pitch area" });
    }
  });
  if (sketch.ballStroke !== null && sketch.ballStroke.length < 2) {
    issues.push({ field: "ball", message: "ball stroke too short to resample" });
  }
  if (sketch.defenderAnchors.length !== N_PLAYERS) {
    issues.push({
      field: "defenders",
      message: `need ${N_PLAYERS} defender positions, have ${sketch.defenderAnchors.length}`,
    });
  }
  if (sketch.horizon !== null && (sketch.horizon < 1 || sketch.horizon > spec.horizon)) {
    issues.push({
      field: "horizon",
      message: `horizon must be 1..${spec.horizon}`,
    });
  }
  return issues;
}

export interface ScenarioRequestBody {
  model_id: string | null;
  frame_rate_hz: number;
  units: "m";
  horizon: number | null;
  ball: number[][];
  attackers: number[][][];
  defenders_past: number[][][];
}

/** Resample the sketch into the request the service expects. */
export function buildScenarioRequest(
  sketch: PlaySketch,
  spec: ServiceSpec,
): ScenarioRequestBody {
  const issues = validateSketch(sketch, spec);
  if (issues.length > 0) {
    throw new Error(`invalid sketch: ${issues.map((i) => `${i.field}: ${i.message}`).join("; ")}`);
  }
  const steps = spec.conditioned ? spec.input_len + spec.horizon : spec.input_len;
  const toPairs = (pts: Point[]) => pts.map((p) => [p.x, p.y]);
  const attackers = sketch.attackerStrokes.map((stroke) =>
    toPairs(resampleStroke(stroke, steps)),
  );
  const ballStroke = sketch.ballStroke ?? sketch.attackerStrokes[0]!;
  const ball = toPairs(resampleStroke(ballStroke, steps));
  const defenders = sketch.defenderAnchors.map((anchor) =>
    Array.from({ length: spec.input_len }, () => [anchor.x, anchor.y]),
  );
  return {
    model_id: sketch.modelId,
    frame_rate_hz: FRAME_RATE_HZ,
    units: "m",
    horizon: sketch.horizon,
    ball,
    attackers,
    defenders_past: defenders,
  };
}

/** Exact bytes the client posts; kept stable so replies can be golden-tested. */
export function encodeRequest(body: ScenarioRequestBody): string {
  return JSON.stringify(body);
}
