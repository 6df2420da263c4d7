// Canvas rendering: pitch, strokes, predicted trajectories, control-point
// markers and the playback cursor. All meter<->pixel conversion happens
// here at the canvas boundary.

import { PITCH_LENGTH_M, PITCH_WIDTH_M, Point } from "./geometry.js";
import { AgentPrediction, PredictionResponse } from "./client.js";
import { PlaySketch } from "./sketch.js";

export const PX_PER_M = 8;
export const CANVAS_W = (PITCH_LENGTH_M + 6) * PX_PER_M;
export const CANVAS_H = (PITCH_WIDTH_M + 6) * PX_PER_M;

export function toCanvas(p: Point): Point {
  return {
    x: (p.x + PITCH_LENGTH_M / 2 + 3) * PX_PER_M,
    y: (PITCH_WIDTH_M / 2 - p.y + 3) * PX_PER_M,
  };
}

export function toPitch(px: Point): Point {
  return {
    x: px.x / PX_PER_M - PITCH_LENGTH_M / 2 - 3,
    y: PITCH_WIDTH_M / 2 - (px.y / PX_PER_M - 3),
  };
}

const COLORS = {
  attacker: "#d62728",
  ball: "#f2a900",
  defender: "#1f77b4",
  prediction: "#1f77b4",
  previous: "rgba(31, 119, 180, 0.30)",
  marker: "#8c5a2b",
};

function drawPolyline(ctx: CanvasRenderingContext2D, pts: Point[], color: string, width = 2) {
  if (pts.length < 2) return;
  ctx.strokeStyle = color;
  ctx.lineWidth = width;
  ctx.beginPath();
  const first = toCanvas(pts[0]!);
  ctx.moveTo(first.x, first.y);
  for (const p of pts.slice(1)) {
    const c = toCanvas(p);
    ctx.lineTo(c.x, c.y);
  }
  ctx.stroke();
}

function drawDot(ctx: CanvasRenderingContext2D, p: Point, color: string, r = 4) {
  const c = toCanvas(p);
  ctx.fillStyle = color;
  ctx.beginPath();
  ctx.arc(c.x, c.y, r, 0, 2 * Math.PI);
  ctx.fill();
}

export function drawPitch(ctx: CanvasRenderingContext2D): void {
  ctx.fillStyle = "#2e7d32";
  ctx.fillRect(0, 0, CANVAS_W, CANVAS_H);
  ctx.strokeStyle = "rgba(255,255,255,0.9)";
  ctx.lineWidth = 2;
  const tl = toCanvas({ x: -PITCH_LENGTH_M / 2, y: PITCH_WIDTH_M / 2 });
  ctx.strokeRect(tl.x, tl.y, PITCH_LENGTH_M * PX_PER_M, PITCH_WIDTH_M * PX_PER_M);
  const mid = toCanvas({ x: 0, y: 0 });
  ctx.beginPath();
  ctx.moveTo(mid.x, tl.y);
  ctx.lineTo(mid.x, tl.y + PITCH_WIDTH_M * PX_PER_M);
  ctx.stroke();
  ctx.beginPath();
  ctx.arc(mid.x, mid.y, 9.15 * PX_PER_M, 0, 2 * Math.PI);
  ctx.stroke();
}

function agentPoints(agent: AgentPrediction): Point[] {
  return agent.trajectory.map(([x, y]) => ({ x: x!, y: y! }));
}

export interface Overlay {
  current: PredictionResponse | null;
  previous: PredictionResponse | null;
  playbackStep: number; // 0 .. horizon
}

export function drawScene(
  ctx: CanvasRenderingContext2D,
  sketch: PlaySketch,
  overlay: Overlay,
): void {
  drawPitch(ctx);
  for (const stroke of sketch.attackerStrokes) {
    drawPolyline(ctx, stroke, COLORS.attacker);
    if (stroke.length > 0) drawDot(ctx, stroke[0]!, COLORS.attacker, 5);
  }
  if (sketch.ballStroke) {
    drawPolyline(ctx, sketch.ballStroke, COLORS.ball);
  }
  for (const anchor of sketch.defenderAnchors) {
    drawDot(ctx, anchor, COLORS.defender, 6);
  }
  if (overlay.previous) {
    for (const agent of overlay.previous.agents) {
      drawPolyline(ctx, agentPoints(agent), COLORS.previous, 2);
    }
  }
  if (overlay.current) {
    for (const agent of overlay.current.agents) {
      const pts = agentPoints(agent);
      drawPolyline(ctx, pts, COLORS.prediction, 2.5);
      // control points exactly as returned by the service
      for (const c of agent.controls ?? []) {
        drawDot(ctx, { x: c.position[0]!, y: c.position[1]! }, COLORS.marker, 4);
      }
      const step = Math.min(overlay.playbackStep, pts.length - 1);
      if (step >= 0 && pts.length > 0) {
        drawDot(ctx, pts[step]!, "#ffffff", 5);
      }
    }
  }
}
