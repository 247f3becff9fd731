/**
 * Overlay of one trajectory per resolution in the camera plane (x
 * against z), one color per input, coarser subsamples drawn on top of
 * the full-rate path they were thinned from.
 */

import { basename } from "node:path";
import { SchemaError, TrajectoryFile } from "../csv.js";
import {
  AXIS_COLOR,
  LABEL_SIZE,
  drawCaption,
  drawFrame,
  drawXAxis,
  drawYAxis,
  makeAxis,
  padInterval,
} from "../axes.js";
import { Figure, PlotRect } from "../scene.js";

export const SERIES_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

const WIDTH = 800;
const HEIGHT = 620;
const PLOT: PlotRect = { x0: 90, y0: 40, x1: WIDTH - 30, y1: HEIGHT - 110 };

function checkSharedOrigin(inputs: TrajectoryFile[]): void {
  const first = inputs[0]!;
  for (const other of inputs.slice(1)) {
    const same =
      Math.abs(other.t[0]! - first.t[0]!) <= 1e-12 &&
      ["x", "y", "z"].every((axis) => {
        const a = (first as unknown as Record<string, number[]>)[axis]![0]!;
        const b = (other as unknown as Record<string, number[]>)[axis]![0]!;
        return Math.abs(a - b) <= 1e-12 * Math.max(1, Math.abs(a));
      });
    if (!same) {
      throw new SchemaError(
        `${other.path}: does not share the origin frame of ${first.path}; ` +
          `overlays must come from resolutions of the same run`,
      );
    }
  }
}

export function buildPathOverlay(inputs: TrajectoryFile[]): Figure {
  if (inputs.length === 0) {
    throw new SchemaError("no input trajectories given");
  }
  if (inputs.length > SERIES_COLORS.length) {
    throw new SchemaError(`at most ${SERIES_COLORS.length} overlays supported, got ${inputs.length}`);
  }
  checkSharedOrigin(inputs);

  const figure: Figure = {
    widthPx: WIDTH,
    heightPx: HEIGHT,
    background: "#ffffff",
    items: [],
    metadata: {
      figure: "path-overlay",
      inputs: JSON.stringify(
        inputs.map((f) => ({ file: basename(f.path), sha256: f.sha256, fps: f.fps })),
      ),
    },
  };

  const allX = inputs.flatMap((f) => f.x);
  const allZ = inputs.flatMap((f) => f.z);
  const [xMin, xMax] = padInterval(Math.min(...allX), Math.max(...allX));
  const [zMin, zMax] = padInterval(Math.min(...allZ), Math.max(...allZ));
  const xAxis = makeAxis("linear", xMin, xMax, PLOT.x0, PLOT.x1);
  const zAxis = makeAxis("linear", zMin, zMax, PLOT.y1, PLOT.y0);

  figure.items.push(...drawXAxis(PLOT, xAxis, "x (m)"));
  figure.items.push(...drawYAxis(PLOT, zAxis, "z (m)"));
  figure.items.push(...drawFrame(PLOT));

  // densest first so the coarse resolutions stay visible on top
  const order = [...inputs.keys()].sort((a, b) => inputs[b]!.t.length - inputs[a]!.t.length);
  for (const idx of order) {
    const f = inputs[idx]!;
    const color = SERIES_COLORS[idx]!;
    figure.items.push({
      kind: "polyline",
      points: f.x.map((xv, i) => [xAxis.scale(xv), zAxis.scale(f.z[i]!)] as [number, number]),
      color,
      width: 2,
      id: `path-${Math.round(f.fps)}fps`,
    });
  }

  // legend, in input order
  inputs.forEach((f, idx) => {
    const lx = PLOT.x0 + 14;
    const ly = PLOT.y0 + 18 + idx * 20;
    figure.items.push({
      kind: "polyline",
      points: [
        [lx, ly - 4],
        [lx + 26, ly - 4],
      ],
      color: SERIES_COLORS[idx]!,
      width: 3,
      id: "legend-line",
    });
    figure.items.push({
      kind: "text",
      x: lx + 34,
      y: ly,
      text: `${formatFps(f.fps)} fps (${basename(f.path)})`,
      size: 12,
      color: AXIS_COLOR,
    });
  });

  figure.items.push({
    kind: "text",
    x: (PLOT.x0 + PLOT.x1) / 2,
    y: 24,
    text: inputs.length > 1 ? "path overlay across resolutions" : "particle path",
    size: LABEL_SIZE,
    color: AXIS_COLOR,
    align: "middle",
  });

  const caption = inputs
    .map((f) => `${basename(f.path)} sha256 ${f.sha256.slice(0, 12)}`)
    .join("   ");
  drawCaption(figure, caption);
  return figure;
}

function formatFps(fps: number): string {
  return String(Number(fps.toPrecision(6)));
}
