// The fixed sketch behind the golden request/response pair. Changing it
// (or the resampler) invalidates the fixtures; re-record with
// RECORD_GOLDEN=1 npm run test:integration

import { Point } from "../src/geometry.js";
import { N_PLAYERS, PlaySketch, emptySketch } from "../src/sketch.js";

export function goldenSketch(): PlaySketch {
  const sketch = emptySketch();
  for (let i = 0; i < N_PLAYERS; i++) {
    const lane = -20 + i * 4;
    const stroke: Point[] = [
      { x: -40, y: lane },
      { x: -12 + i * 0.5, y: lane * 0.5 },
      { x: 18 + i * 0.75, y: lane * 0.25 },
    ];
    sketch.attackerStrokes.push(stroke);
  }
  sketch.ballStroke = [
    { x: -42, y: 0 },
    { x: -5, y: 6 },
    { x: 24, y: -2 },
  ];
  sketch.modelId = "demo";
  return sketch;
}
