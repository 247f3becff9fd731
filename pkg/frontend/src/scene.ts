/**
 * Resolution-independent figure description shared by the SVG and PNG
 * renderers. Figures are built once as a list of primitives in pixel
 * coordinates; the renderers only translate primitives, so both
 * formats show the same picture.
 */

export interface TextItem {
  kind: "text";
  x: number;
  y: number;
  text: string;
  /** glyph height in pixels */
  size: number;
  color: string;
  align?: "start" | "middle" | "end";
  /** rotation in degrees about (x, y); only 0 and -90 are used */
  rotate?: number;
}

export interface PolylineItem {
  kind: "polyline";
  points: Array<[number, number]>;
  color: string;
  width: number;
  dash?: [number, number];
  /** machine-readable handle, emitted as the SVG class attribute */
  id?: string;
}

export interface RectItem {
  kind: "rect";
  x: number;
  y: number;
  w: number;
  h: number;
  fill: string;
  stroke?: string;
  id?: string;
}

export type SceneItem = TextItem | PolylineItem | RectItem;

export interface Figure {
  widthPx: number;
  heightPx: number;
  background: string;
  items: SceneItem[];
  /** embedded verbatim: SVG <metadata>, PNG tEXt chunks */
  metadata: Record<string, string>;
}

/** Margins around the plotting rectangle, in pixels. */
export interface PlotRect {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export type ScaleFn = (value: number) => number;

export function linearScale(d0: number, d1: number, r0: number, r1: number): ScaleFn {
  const span = d1 - d0;
  if (!(span !== 0) || !Number.isFinite(span)) {
    throw new Error(`degenerate linear scale domain [${d0}, ${d1}]`);
  }
  return (v: number) => r0 + ((v - d0) / span) * (r1 - r0);
}

export function logScale(d0: number, d1: number, r0: number, r1: number): ScaleFn {
  if (!(d0 > 0) || !(d1 > 0)) {
    throw new Error(`log scale domain must be positive, got [${d0}, ${d1}]`);
  }
  const inner = linearScale(Math.log10(d0), Math.log10(d1), r0, r1);
  return (v: number) => {
    if (!(v > 0)) throw new Error(`log scale got non-positive value ${v}`);
    return inner(Math.log10(v));
  };
}

/** Round-ish tick positions covering [min, max], at most n+2 of them. */
export function linearTicks(min: number, max: number, n = 5): number[] {
  if (min === max) {
    return [min];
  }
  const rawStep = (max - min) / n;
  const mag = Math.pow(10, Math.floor(Math.log10(Math.abs(rawStep))));
  const norm = rawStep / mag;
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag;
  const first = Math.ceil(min / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= max + step * 1e-9; v += step) {
    // snap away float drift so labels print cleanly
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

/** Decade ticks covering [min, max]; falls back to 1-2-5 subdivisions
 * when the range spans fewer than two decades. */
export function logTicks(min: number, max: number): number[] {
  if (!(min > 0) || !(max > 0)) {
    throw new Error(`log ticks need positive bounds, got [${min}, ${max}]`);
  }
  const lo = Math.floor(Math.log10(min));
  const hi = Math.ceil(Math.log10(max));
  const decades: number[] = [];
  for (let e = lo; e <= hi; e++) {
    decades.push(Number(`1e${e}`));
  }
  const inRange = (v: number) => v >= min / (1 + 1e-9) && v <= max * (1 + 1e-9);
  if (hi - lo >= 2) {
    return decades.filter(inRange);
  }
  const fine: number[] = [];
  for (let e = lo - 1; e <= hi; e++) {
    for (const m of [1, 2, 5]) {
      fine.push(Number(`${m}e${e}`));
    }
  }
  return fine.filter(inRange);
}

/** Compact number label: plain decimals near 1, exponent form elsewhere. */
export function formatTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 0.001 && a < 10000) {
    return String(Number(v.toPrecision(6)));
  }
  return Number(v.toPrecision(3)).toExponential().replace("e+", "e");
}
