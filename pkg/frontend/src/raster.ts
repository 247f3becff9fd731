/**
 * Rasterize a Figure to PNG bytes. Primitives are drawn into an RGBA
 * buffer (no antialiasing, bitmap text), encoded with pngjs, and the
 * figure metadata is appended as standard tEXt chunks so the hashes
 * survive inside the image file itself.
 */

import * as zlib from "node:zlib";
import pngjs from "pngjs";
import { Figure, PolylineItem, RectItem, SceneItem, TextItem } from "./scene.js";
import { GLYPHS, GLYPH_HEIGHT, GLYPH_WIDTH, MISSING_GLYPH } from "./font5x7.js";

const { PNG } = pngjs;

type RGB = [number, number, number];

function parseColor(color: string): RGB {
  const m = /^#([0-9a-fA-F]{6})$/.exec(color);
  if (!m || !m[1]) {
    throw new Error(`unsupported color ${color}; use #rrggbb`);
  }
  const v = parseInt(m[1], 16);
  return [(v >> 16) & 0xff, (v >> 8) & 0xff, v & 0xff];
}

class Canvas {
  readonly width: number;
  readonly height: number;
  readonly data: Buffer;

  constructor(width: number, height: number, background: string) {
    this.width = width;
    this.height = height;
    this.data = Buffer.alloc(width * height * 4);
    const [r, g, b] = parseColor(background);
    for (let i = 0; i < width * height; i++) {
      this.data[i * 4] = r;
      this.data[i * 4 + 1] = g;
      this.data[i * 4 + 2] = b;
      this.data[i * 4 + 3] = 255;
    }
  }

  set(x: number, y: number, [r, g, b]: RGB): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = (y * this.width + x) * 4;
    this.data[i] = r;
    this.data[i + 1] = g;
    this.data[i + 2] = b;
    this.data[i + 3] = 255;
  }

  /** Stamp a filled square of the given radius; radius 0 is one pixel. */
  stamp(x: number, y: number, radius: number, rgb: RGB): void {
    for (let dy = -radius; dy <= radius; dy++) {
      for (let dx = -radius; dx <= radius; dx++) {
        this.set(x + dx, y + dy, rgb);
      }
    }
  }

  line(x0: number, y0: number, x1: number, y1: number, width: number, rgb: RGB): void {
    const r = width <= 1 ? 0 : Math.floor(width / 2);
    let ix0 = Math.round(x0);
    let iy0 = Math.round(y0);
    const ix1 = Math.round(x1);
    const iy1 = Math.round(y1);
    const dx = Math.abs(ix1 - ix0);
    const dy = -Math.abs(iy1 - iy0);
    const sx = ix0 < ix1 ? 1 : -1;
    const sy = iy0 < iy1 ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      this.stamp(ix0, iy0, r, rgb);
      if (ix0 === ix1 && iy0 === iy1) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        ix0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        iy0 += sy;
      }
    }
  }

  fillRect(x: number, y: number, w: number, h: number, rgb: RGB): void {
    const x0 = Math.round(x);
    const y0 = Math.round(y);
    const x1 = Math.round(x + w);
    const y1 = Math.round(y + h);
    for (let yy = y0; yy < y1; yy++) {
      for (let xx = x0; xx < x1; xx++) {
        this.set(xx, yy, rgb);
      }
    }
  }
}

/** Split a polyline into solid sub-segments following the dash pattern. */
function dashSegments(
  points: Array<[number, number]>,
  dash: [number, number],
): Array<Array<[number, number]>> {
  const [on, off] = dash;
  const period = on + off;
  const out: Array<Array<[number, number]>> = [];
  let current: Array<[number, number]> = [];
  let travelled = 0;
  const penDown = (s: number) => s % period < on;
  for (let i = 0; i + 1 < points.length; i++) {
    const [ax, ay] = points[i]!;
    const [bx, by] = points[i + 1]!;
    const len = Math.hypot(bx - ax, by - ay);
    if (len === 0) continue;
    const steps = Math.max(1, Math.ceil(len));
    for (let s = 0; s <= steps; s++) {
      const t = s / steps;
      const p: [number, number] = [ax + (bx - ax) * t, ay + (by - ay) * t];
      if (penDown(travelled + len * t)) {
        current.push(p);
      } else if (current.length > 1) {
        out.push(current);
        current = [];
      } else {
        current = [];
      }
    }
    travelled += len;
  }
  if (current.length > 1) out.push(current);
  return out;
}

function drawPolyline(canvas: Canvas, item: PolylineItem): void {
  const rgb = parseColor(item.color);
  const pieces = item.dash ? dashSegments(item.points, item.dash) : [item.points];
  for (const piece of pieces) {
    for (let i = 0; i + 1 < piece.length; i++) {
      const [x0, y0] = piece[i]!;
      const [x1, y1] = piece[i + 1]!;
      canvas.line(x0, y0, x1, y1, item.width, rgb);
    }
  }
}

function drawRect(canvas: Canvas, item: RectItem): void {
  canvas.fillRect(item.x, item.y, item.w, item.h, parseColor(item.fill));
  if (item.stroke) {
    const rgb = parseColor(item.stroke);
    canvas.line(item.x, item.y, item.x + item.w, item.y, 1, rgb);
    canvas.line(item.x + item.w, item.y, item.x + item.w, item.y + item.h, 1, rgb);
    canvas.line(item.x + item.w, item.y + item.h, item.x, item.y + item.h, 1, rgb);
    canvas.line(item.x, item.y + item.h, item.x, item.y, 1, rgb);
  }
}

function drawText(canvas: Canvas, item: TextItem): void {
  const rgb = parseColor(item.color);
  const scale = Math.max(1, Math.floor(item.size / GLYPH_HEIGHT));
  const advance = (GLYPH_WIDTH + 1) * scale;
  const textWidth = item.text.length * advance - scale;
  let startDx = 0;
  if (item.align === "middle") startDx = -textWidth / 2;
  if (item.align === "end") startDx = -textWidth;
  // (dx, dy) offsets from the anchor, dy measured up from the baseline
  const place = (dx: number, dy: number): [number, number] => {
    if (item.rotate === -90) {
      return [Math.round(item.x + dy), Math.round(item.y - dx)];
    }
    return [Math.round(item.x + dx), Math.round(item.y + dy)];
  };
  for (let c = 0; c < item.text.length; c++) {
    const glyph = GLYPHS[item.text[c]!] ?? MISSING_GLYPH;
    const baseDx = startDx + c * advance;
    for (let row = 0; row < GLYPH_HEIGHT; row++) {
      const bits = glyph[row]!;
      for (let col = 0; col < GLYPH_WIDTH; col++) {
        if (bits[col] !== "#") continue;
        for (let sy = 0; sy < scale; sy++) {
          for (let sx = 0; sx < scale; sx++) {
            const dx = baseDx + col * scale + sx;
            const dy = (row - GLYPH_HEIGHT + 1) * scale + sy;
            const [px, py] = place(dx, dy);
            canvas.set(px, py, rgb);
          }
        }
      }
    }
  }
}

function drawItem(canvas: Canvas, item: SceneItem): void {
  if (item.kind === "polyline") drawPolyline(canvas, item);
  else if (item.kind === "rect") drawRect(canvas, item);
  else drawText(canvas, item);
}

const crc32: (data: Buffer) => number = (zlib as unknown as { crc32(d: Buffer): number }).crc32;

function textChunk(keyword: string, value: string): Buffer {
  const body = Buffer.concat([
    Buffer.from(keyword, "latin1"),
    Buffer.from([0]),
    Buffer.from(value, "latin1"),
  ]);
  const typed = Buffer.concat([Buffer.from("tEXt", "latin1"), body]);
  const head = Buffer.alloc(4);
  head.writeUInt32BE(body.length, 0);
  const tail = Buffer.alloc(4);
  tail.writeUInt32BE(crc32(typed) >>> 0, 0);
  return Buffer.concat([head, typed, tail]);
}

/** Insert tEXt chunks just before the closing IEND chunk. */
function withMetadata(png: Buffer, metadata: Record<string, string>): Buffer {
  const iendStart = png.length - 12;
  if (png.subarray(iendStart + 4, iendStart + 8).toString("latin1") !== "IEND") {
    throw new Error("unexpected PNG layout: IEND not at the tail");
  }
  const chunks = Object.entries(metadata).map(([k, v]) => textChunk(k, v));
  return Buffer.concat([png.subarray(0, iendStart), ...chunks, png.subarray(iendStart)]);
}

export function renderPng(figure: Figure): Buffer {
  const canvas = new Canvas(figure.widthPx, figure.heightPx, figure.background);
  for (const item of figure.items) {
    drawItem(canvas, item);
  }
  const png = new PNG({ width: figure.widthPx, height: figure.heightPx });
  canvas.data.copy(png.data);
  const encoded = PNG.sync.write(png);
  return withMetadata(encoded, figure.metadata);
}
