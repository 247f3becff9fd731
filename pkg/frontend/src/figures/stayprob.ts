/**
 * Heatmap of the stay probability over a (window width, lag) grid.
 * Cells are colored on a fixed [0, 1] ramp so separate figures are
 * directly comparable; each cell also prints its value.
 */

import { basename } from "node:path";
import { SchemaError, StayProbFile } from "../csv.js";
import { AXIS_COLOR, LABEL_SIZE, drawCaption } from "../axes.js";
import { Figure, formatTick } from "../scene.js";

const WIDTH = 800;
const HEIGHT = 620;
const PLOT = { x0: 110, y0: 60, x1: WIDTH - 120, y1: HEIGHT - 110 };

/** White-to-blue ramp over [0, 1]. */
export function rampColor(v: number): string {
  const clamp = Math.min(1, Math.max(0, v));
  const from = [247, 251, 255];
  const to = [8, 48, 107];
  const mix = from.map((f, i) => Math.round(f + (to[i]! - f) * clamp));
  return `#${mix.map((c) => c.toString(16).padStart(2, "0")).join("")}`;
}

export function buildStayProbHeatmap(stay: StayProbFile): Figure {
  const widths = [...new Set(stay.rows.map((r) => r.width_m))].sort((a, b) => a - b);
  const taus = [...new Set(stay.rows.map((r) => r.tau_s))].sort((a, b) => a - b);
  const byKey = new Map(stay.rows.map((r) => [`${r.width_m}|${r.tau_s}`, r.stay_probability]));
  if (byKey.size !== stay.rows.length) {
    throw new SchemaError(`${stay.path}: duplicate (width_m, tau_s) rows`);
  }

  const figure: Figure = {
    widthPx: WIDTH,
    heightPx: HEIGHT,
    background: "#ffffff",
    items: [],
    metadata: {
      figure: "stayprob-heatmap",
      inputs: JSON.stringify({ file: basename(stay.path), sha256: stay.sha256 }),
    },
  };

  const cellW = (PLOT.x1 - PLOT.x0) / taus.length;
  const cellH = (PLOT.y1 - PLOT.y0) / widths.length;

  widths.forEach((width, wi) => {
    taus.forEach((tau, ti) => {
      const x = PLOT.x0 + ti * cellW;
      // row 0 (smallest width) at the bottom
      const y = PLOT.y1 - (wi + 1) * cellH;
      const value = byKey.get(`${width}|${tau}`);
      if (value === undefined) {
        figure.items.push({
          kind: "rect",
          x,
          y,
          w: cellW,
          h: cellH,
          fill: "#ffffff",
          stroke: "#bbbbbb",
          id: "cell-missing",
        });
        return;
      }
      figure.items.push({
        kind: "rect",
        x,
        y,
        w: cellW,
        h: cellH,
        fill: rampColor(value),
        stroke: "#ffffff",
        id: "cell",
      });
      figure.items.push({
        kind: "text",
        x: x + cellW / 2,
        y: y + cellH / 2 + 4,
        text: value.toFixed(3),
        size: 12,
        color: value > 0.55 ? "#ffffff" : "#222222",
        align: "middle",
      });
    });
  });

  // axis tick labels: categorical positions, numeric values
  taus.forEach((tau, ti) => {
    figure.items.push({
      kind: "text",
      x: PLOT.x0 + (ti + 0.5) * cellW,
      y: PLOT.y1 + 20,
      text: formatTick(tau),
      size: 12,
      color: AXIS_COLOR,
      align: "middle",
    });
  });
  widths.forEach((width, wi) => {
    figure.items.push({
      kind: "text",
      x: PLOT.x0 - 8,
      y: PLOT.y1 - (wi + 0.5) * cellH + 4,
      text: formatTick(width),
      size: 12,
      color: AXIS_COLOR,
      align: "end",
    });
  });
  figure.items.push({
    kind: "text",
    x: (PLOT.x0 + PLOT.x1) / 2,
    y: PLOT.y1 + 46,
    text: "lag tau (s)",
    size: LABEL_SIZE,
    color: AXIS_COLOR,
    align: "middle",
  });
  figure.items.push({
    kind: "text",
    x: 22,
    y: (PLOT.y0 + PLOT.y1) / 2,
    text: "window width (m)",
    size: LABEL_SIZE,
    color: AXIS_COLOR,
    align: "middle",
    rotate: -90,
  });
  figure.items.push({
    kind: "text",
    x: (PLOT.x0 + PLOT.x1) / 2,
    y: 34,
    text: "probability of staying inside the window",
    size: LABEL_SIZE,
    color: AXIS_COLOR,
    align: "middle",
  });

  // colorbar
  const barX = WIDTH - 80;
  const steps = 64;
  const barH = PLOT.y1 - PLOT.y0;
  for (let s = 0; s < steps; s++) {
    const v0 = s / steps;
    figure.items.push({
      kind: "rect",
      x: barX,
      y: PLOT.y1 - ((s + 1) / steps) * barH,
      w: 18,
      h: barH / steps + 1,
      fill: rampColor(v0),
      id: "colorbar",
    });
  }
  for (const v of [0, 0.5, 1]) {
    figure.items.push({
      kind: "text",
      x: barX + 24,
      y: PLOT.y1 - v * barH + 4,
      text: v.toFixed(1),
      size: 12,
      color: AXIS_COLOR,
    });
  }

  drawCaption(figure, `${basename(stay.path)} sha256 ${stay.sha256.slice(0, 12)}`);
  return figure;
}
