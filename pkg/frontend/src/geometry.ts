// Pitch-space geometry: polylines in meters, arc-length resampling.

export interface Point {
  x: number;
  y: number;
}

export const PITCH_LENGTH_M = 105;
export const PITCH_WIDTH_M = 68;

export function polylineLength(points: Point[]): number {
  let total = 0;
  for (let i = 1; i < points.length; i++) {
    const a = points[i - 1]!;
    const b = points[i]!;
    total += Math.hypot(b.x - a.x, b.y - a.y);
  }
  return total;
}

/**
 * Resample a freehand stroke to `n` uniformly spaced time steps.
 *
 * Samples sit at equal arc-length increments along the polyline, so the
 * resampled trajectory traverses the stroke at constant speed over the
 * configured window. The first and last stroke points are always kept.
 * A stroke needs at least 2 points; a zero-length stroke (all points
 * coincident) resamples to `n` copies of that point.
 */
export function resampleStroke(points: Point[], n: number): Point[] {
  if (points.length < 2) {
    throw new Error(`stroke needs at least 2 points, got ${points.length}`);
  }
  if (n < 2) {
    throw new Error(`need at least 2 samples, got ${n}`);
  }
  const cumulative: number[] = [0];
  for (let i = 1; i < points.length; i++) {
    const a = points[i - 1]!;
    const b = points[i]!;
    cumulative.push(cumulative[i - 1]! + Math.hypot(b.x - a.x, b.y - a.y));
  }
  const total = cumulative[cumulative.length - 1]!;
  if (total === 0) {
    return Array.from({ length: n }, () => ({ ...points[0]! }));
  }
  const out: Point[] = [];
  let seg = 0;
  for (let i = 0; i < n; i++) {
    const target = (total * i) / (n - 1);
    while (seg < points.length - 2 && cumulative[seg + 1]! < target) {
      seg++;
    }
    const span = cumulative[seg + 1]! - cumulative[seg]!;
    const t = span === 0 ? 0 : (target - cumulative[seg]!) / span;
    const a = points[seg]!;
    const b = points[seg + 1]!;
    out.push({ x: a.x + (b.x - a.x) * t, y: a.y + (b.y - a.y) * t });
  }
  return out;
}

export function withinPitch(p: Point, slackM = 10): boolean {
  return (
    Math.abs(p.x) <= PITCH_LENGTH_M / 2 + slackM &&
    Math.abs(p.y) <= PITCH_WIDTH_M / 2 + slackM
  );
}
