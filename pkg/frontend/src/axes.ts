/** Axis drawing shared by all three figure kinds. */

import {
  Figure,
  PlotRect,
  ScaleFn,
  SceneItem,
  formatTick,
  linearScale,
  linearTicks,
  logScale,
  logTicks,
} from "./scene.js";

export const AXIS_COLOR = "#333333";
export const GRID_COLOR = "#dddddd";
export const LABEL_SIZE = 14;
export const TICK_SIZE = 12;

export interface Axis {
  scale: ScaleFn;
  ticks: number[];
}

export function makeAxis(
  kind: "linear" | "log",
  dMin: number,
  dMax: number,
  rMin: number,
  rMax: number,
): Axis {
  if (kind === "log") {
    return { scale: logScale(dMin, dMax, rMin, rMax), ticks: logTicks(dMin, dMax) };
  }
  return { scale: linearScale(dMin, dMax, rMin, rMax), ticks: linearTicks(dMin, dMax) };
}

/** Pad a [min, max] data interval so points do not sit on the frame. */
export function padInterval(min: number, max: number, frac = 0.06): [number, number] {
  if (min === max) {
    const bump = min === 0 ? 1 : Math.abs(min) * frac;
    return [min - bump, max + bump];
  }
  const pad = (max - min) * frac;
  return [min - pad, max + pad];
}

/** Multiply a positive [min, max] interval outward for log plotting. */
export function padLogInterval(min: number, max: number, factor = 1.25): [number, number] {
  return [min / factor, max * factor];
}

export function drawFrame(plot: PlotRect): SceneItem[] {
  return [
    {
      kind: "polyline",
      points: [
        [plot.x0, plot.y0],
        [plot.x1, plot.y0],
        [plot.x1, plot.y1],
        [plot.x0, plot.y1],
        [plot.x0, plot.y0],
      ],
      color: AXIS_COLOR,
      width: 1,
      id: "frame",
    },
  ];
}

export function drawXAxis(plot: PlotRect, axis: Axis, title: string): SceneItem[] {
  const items: SceneItem[] = [];
  for (const t of axis.ticks) {
    const x = axis.scale(t);
    items.push({ kind: "polyline", points: [[x, plot.y0], [x, plot.y1]], color: GRID_COLOR, width: 1, id: "grid-x" });
    items.push({ kind: "polyline", points: [[x, plot.y1], [x, plot.y1 + 5]], color: AXIS_COLOR, width: 1 });
    items.push({
      kind: "text",
      x,
      y: plot.y1 + 7 + TICK_SIZE,
      text: formatTick(t),
      size: TICK_SIZE,
      color: AXIS_COLOR,
      align: "middle",
    });
  }
  items.push({
    kind: "text",
    x: (plot.x0 + plot.x1) / 2,
    y: plot.y1 + 12 + 2 * TICK_SIZE + LABEL_SIZE,
    text: title,
    size: LABEL_SIZE,
    color: AXIS_COLOR,
    align: "middle",
  });
  return items;
}

export function drawYAxis(plot: PlotRect, axis: Axis, title: string): SceneItem[] {
  const items: SceneItem[] = [];
  for (const t of axis.ticks) {
    const y = axis.scale(t);
    items.push({ kind: "polyline", points: [[plot.x0, y], [plot.x1, y]], color: GRID_COLOR, width: 1, id: "grid-y" });
    items.push({ kind: "polyline", points: [[plot.x0 - 5, y], [plot.x0, y]], color: AXIS_COLOR, width: 1 });
    items.push({
      kind: "text",
      x: plot.x0 - 9,
      y: y + TICK_SIZE / 3,
      text: formatTick(t),
      size: TICK_SIZE,
      color: AXIS_COLOR,
      align: "end",
    });
  }
  items.push({
    kind: "text",
    x: 18,
    y: (plot.y0 + plot.y1) / 2,
    text: title,
    size: LABEL_SIZE,
    color: AXIS_COLOR,
    align: "middle",
    rotate: -90,
  });
  return items;
}

/** Footer line naming the inputs and their hashes; the full hashes also
 * travel in the figure metadata. */
export function drawCaption(figure: Figure, text: string): void {
  figure.items.push({
    kind: "text",
    x: 10,
    y: figure.heightPx - 8,
    text,
    size: 11,
    color: "#666666",
    align: "start",
  });
}
