/**
 * Error law curves from a sweep CSV: measured RMSE against observation
 * duration, one solid curve per resolution factor, with the matching
 * 1/sqrt(N) predictions overlaid as dashed references. Both axes are
 * logarithmic, so the prediction renders as straight lines of slope
 * -1/2 and the measured curves hug them.
 */

import { basename } from "node:path";
import { SchemaError, SweepFile, SweepRow } from "../csv.js";
import {
  AXIS_COLOR,
  LABEL_SIZE,
  drawCaption,
  drawFrame,
  drawXAxis,
  drawYAxis,
  makeAxis,
  padLogInterval,
} from "../axes.js";
import { Figure, PlotRect } from "../scene.js";
import { SERIES_COLORS } from "./paths.js";

const WIDTH = 800;
const HEIGHT = 620;
const PLOT: PlotRect = { x0: 95, y0: 40, x1: WIDTH - 30, y1: HEIGHT - 110 };
const DASH: [number, number] = [7, 5];

export function buildErrorCurves(sweep: SweepFile): Figure {
  const obsValues = [...new Set(sweep.rows.map((r) => r.observation_s))];
  if (obsValues.length < 2) {
    throw new SchemaError(
      `${sweep.path}: need at least 2 observation durations to draw curves, got ${obsValues.length}`,
    );
  }

  const byFactor = new Map<number, SweepRow[]>();
  for (const row of sweep.rows) {
    const group = byFactor.get(row.factor) ?? [];
    group.push(row);
    byFactor.set(row.factor, group);
  }
  const factors = [...byFactor.keys()].sort((a, b) => a - b);
  for (const rows of byFactor.values()) {
    rows.sort((a, b) => a.observation_s - b.observation_s);
  }

  const figure: Figure = {
    widthPx: WIDTH,
    heightPx: HEIGHT,
    background: "#ffffff",
    items: [],
    metadata: {
      figure: "error-curves",
      inputs: JSON.stringify({ file: basename(sweep.path), sha256: sweep.sha256 }),
      manifest_hash: sweep.manifestHashes.join(","),
    },
  };

  const allRmse = sweep.rows.flatMap((r) => [r.rmse_visc_mPas, r.predicted_rmse_mPas]);
  const [xMin, xMax] = padLogInterval(Math.min(...obsValues), Math.max(...obsValues));
  const [yMin, yMax] = padLogInterval(Math.min(...allRmse), Math.max(...allRmse));
  const xAxis = makeAxis("log", xMin, xMax, PLOT.x0, PLOT.x1);
  const yAxis = makeAxis("log", yMin, yMax, PLOT.y1, PLOT.y0);

  figure.items.push(...drawXAxis(PLOT, xAxis, "observation duration (s)"));
  figure.items.push(...drawYAxis(PLOT, yAxis, "RMSE (mPa s)"));
  figure.items.push(...drawFrame(PLOT));

  factors.forEach((factor, idx) => {
    const rows = byFactor.get(factor)!;
    const color = SERIES_COLORS[idx % SERIES_COLORS.length]!;
    figure.items.push({
      kind: "polyline",
      points: rows.map((r) => [xAxis.scale(r.observation_s), yAxis.scale(r.predicted_rmse_mPas)]),
      color,
      width: 1,
      dash: DASH,
      id: `prediction-f${factor}`,
    });
    figure.items.push({
      kind: "polyline",
      points: rows.map((r) => [xAxis.scale(r.observation_s), yAxis.scale(r.rmse_visc_mPas)]),
      color,
      width: 2,
      id: `measured-f${factor}`,
    });
    for (const r of rows) {
      figure.items.push({
        kind: "rect",
        x: xAxis.scale(r.observation_s) - 3,
        y: yAxis.scale(r.rmse_visc_mPas) - 3,
        w: 6,
        h: 6,
        fill: color,
        id: "marker",
      });
    }
  });

  // legend: one entry per factor plus the dashed reference key
  factors.forEach((factor, idx) => {
    const rows = byFactor.get(factor)!;
    const fps = rows[0]!.fps_effective;
    const lx = PLOT.x1 - 240;
    const ly = PLOT.y0 + 18 + idx * 20;
    figure.items.push({
      kind: "polyline",
      points: [
        [lx, ly - 4],
        [lx + 26, ly - 4],
      ],
      color: SERIES_COLORS[idx % SERIES_COLORS.length]!,
      width: 3,
      id: "legend-line",
    });
    figure.items.push({
      kind: "text",
      x: lx + 34,
      y: ly,
      text: `factor ${factor} (${Number(fps.toPrecision(6))} fps)`,
      size: 12,
      color: AXIS_COLOR,
    });
  });
  const refY = PLOT.y0 + 18 + factors.length * 20;
  figure.items.push({
    kind: "polyline",
    points: [
      [PLOT.x1 - 240, refY - 4],
      [PLOT.x1 - 240 + 26, refY - 4],
    ],
    color: AXIS_COLOR,
    width: 1,
    dash: DASH,
    id: "legend-line",
  });
  figure.items.push({
    kind: "text",
    x: PLOT.x1 - 240 + 34,
    y: refY,
    text: "1/sqrt(N) prediction",
    size: 12,
    color: AXIS_COLOR,
  });

  figure.items.push({
    kind: "text",
    x: (PLOT.x0 + PLOT.x1) / 2,
    y: 24,
    text: "viscosity error against observation duration",
    size: LABEL_SIZE,
    color: AXIS_COLOR,
    align: "middle",
  });

  drawCaption(
    figure,
    `${basename(sweep.path)} sha256 ${sweep.sha256.slice(0, 12)}   manifest ${sweep.manifestHashes
      .map((h) => h.slice(0, 12))
      .join(",")}`,
  );
  return figure;
}
