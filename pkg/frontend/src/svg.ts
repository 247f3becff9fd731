/** Serialize a Figure to a standalone SVG document. */

import { Figure, SceneItem } from "./scene.js";

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function num(v: number): string {
  return String(Number(v.toFixed(2)));
}

function renderItem(item: SceneItem): string {
  if (item.kind === "rect") {
    const stroke = item.stroke ? ` stroke="${item.stroke}"` : "";
    const cls = item.id ? ` class="${esc(item.id)}"` : "";
    return `<rect${cls} x="${num(item.x)}" y="${num(item.y)}" width="${num(item.w)}" height="${num(item.h)}" fill="${item.fill}"${stroke}/>`;
  }
  if (item.kind === "polyline") {
    const pts = item.points.map(([x, y]) => `${num(x)},${num(y)}`).join(" ");
    const dash = item.dash ? ` stroke-dasharray="${item.dash[0]} ${item.dash[1]}"` : "";
    const cls = item.id ? ` class="${esc(item.id)}"` : "";
    return `<polyline${cls} points="${pts}" fill="none" stroke="${item.color}" stroke-width="${item.width}"${dash}/>`;
  }
  const anchor = item.align === "middle" ? "middle" : item.align === "end" ? "end" : "start";
  const rot = item.rotate ? ` transform="rotate(${item.rotate} ${num(item.x)} ${num(item.y)})"` : "";
  return (
    `<text x="${num(item.x)}" y="${num(item.y)}" font-family="Helvetica, Arial, sans-serif" ` +
    `font-size="${item.size}" fill="${item.color}" text-anchor="${anchor}"${rot}>${esc(item.text)}</text>`
  );
}

export function renderSvg(figure: Figure): string {
  const lines: string[] = [];
  lines.push(`<?xml version="1.0" encoding="UTF-8"?>`);
  lines.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${figure.widthPx}" height="${figure.heightPx}" ` +
      `viewBox="0 0 ${figure.widthPx} ${figure.heightPx}">`,
  );
  lines.push(`<metadata>${esc(JSON.stringify(figure.metadata))}</metadata>`);
  lines.push(`<rect x="0" y="0" width="${figure.widthPx}" height="${figure.heightPx}" fill="${figure.background}"/>`);
  for (const item of figure.items) {
    lines.push(renderItem(item));
  }
  lines.push(`</svg>`);
  return lines.join("\n") + "\n";
}
