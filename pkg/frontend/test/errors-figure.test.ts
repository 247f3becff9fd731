import { readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import {
  type PolylineItem,
  type SweepRow,
  buildErrorCurves,
  readSweep,
} from "../src/index.js";
import { fixture, tempDir } from "./helpers.js";

const SWEEP = readSweep(fixture("sweep.csv"));

function fitSlope(xs: number[], ys: number[]): number {
  const lx = xs.map(Math.log10);
  const ly = ys.map(Math.log10);
  const mx = lx.reduce((a, b) => a + b, 0) / lx.length;
  const my = ly.reduce((a, b) => a + b, 0) / ly.length;
  let num = 0;
  let den = 0;
  for (let i = 0; i < lx.length; i += 1) {
    num += (lx[i]! - mx) * (ly[i]! - my);
    den += (lx[i]! - mx) ** 2;
  }
  return num / den;
}

function groupByFactor(rows: SweepRow[]): Map<number, SweepRow[]> {
  const groups = new Map<number, SweepRow[]>();
  for (const row of rows) {
    const group = groups.get(row.factor) ?? [];
    group.push(row);
    groups.set(row.factor, group);
  }
  for (const group of groups.values()) {
    group.sort((a, b) => a.observation_s - b.observation_s);
  }
  return groups;
}

function curveIds(kindPrefix: string): string[] {
  return buildErrorCurves(SWEEP)
    .items.filter(
      (i): i is PolylineItem => i.kind === "polyline" && (i.id ?? "").startsWith(kindPrefix),
    )
    .map((p) => p.id!)
    .sort();
}

describe("buildErrorCurves", () => {
  it("draws a measured curve and a dashed prediction per factor", () => {
    expect(curveIds("measured-")).toEqual(["measured-f1", "measured-f2", "measured-f4"]);
    expect(curveIds("prediction-")).toEqual([
      "prediction-f1",
      "prediction-f2",
      "prediction-f4",
    ]);
    const items = buildErrorCurves(SWEEP).items.filter(
      (i): i is PolylineItem => i.kind === "polyline",
    );
    for (const item of items) {
      const id = item.id ?? "";
      if (id.startsWith("prediction-")) expect(item.dash).toBeDefined();
      if (id.startsWith("measured-")) expect(item.dash).toBeUndefined();
    }
  });

  it("plots data that follows the half-power error law", () => {
    for (const rows of groupByFactor(SWEEP.rows).values()) {
      const obs = rows.map((r) => r.observation_s);
      const measured = fitSlope(obs, rows.map((r) => r.rmse_visc_mPas));
      const predicted = fitSlope(obs, rows.map((r) => r.predicted_rmse_mPas));
      expect(measured).toBeGreaterThan(-0.56);
      expect(measured).toBeLessThan(-0.44);
      expect(predicted).toBeCloseTo(-0.5, 9);
    }
  });

  it("renders predictions as straight lines in log-log pixel space", () => {
    const line = buildErrorCurves(SWEEP).items.find(
      (i): i is PolylineItem => i.kind === "polyline" && i.id === "prediction-f1",
    )!;
    const [x0, y0] = line.points[0]!;
    const [x1, y1] = line.points.at(-1)!;
    const length = Math.hypot(x1 - x0, y1 - y0);
    for (const [px, py] of line.points) {
      const deviation = Math.abs((x1 - x0) * (y0 - py) - (x0 - px) * (y1 - y0)) / length;
      expect(deviation).toBeLessThan(0.5);
    }
  });

  it("embeds the file hash and the run manifest hash", () => {
    const figure = buildErrorCurves(SWEEP);
    expect(figure.metadata.figure).toBe("error-curves");
    const inputs = JSON.parse(figure.metadata.inputs!) as { file: string; sha256: string };
    expect(inputs.file).toBe("sweep.csv");
    expect(inputs.sha256).toBe(SWEEP.sha256);
    expect(figure.metadata.manifest_hash).toBe(
      "53872efacebc2f840612eab98db74d2500ebb748acb1134bb2ca01fe953b9cfd",
    );
    const caption = figure.items.filter((i) => i.kind === "text").at(-1)!;
    expect((caption as { text: string }).text).toContain(SWEEP.sha256.slice(0, 12));
    expect((caption as { text: string }).text).toContain("53872efacebc");
  });

  it("accepts a sweep holding a single resolution", () => {
    const lines = readFileSync(fixture("sweep.csv"), "utf8").trim().split("\n");
    const kept = [lines[0]!, ...lines.slice(1).filter((l) => l.split(",")[5] === "1")];
    const path = join(tempDir(), "single_factor.csv");
    writeFileSync(path, kept.join("\n") + "\n");
    const figure = buildErrorCurves(readSweep(path));
    const measured = figure.items.filter(
      (i) => i.kind === "polyline" && (i.id ?? "").startsWith("measured-"),
    );
    expect(measured.length).toBe(1);
  });

  it("rejects a sweep with a single observation duration", () => {
    const lines = readFileSync(fixture("sweep.csv"), "utf8").trim().split("\n");
    const kept = [lines[0]!, ...lines.slice(1).filter((l) => l.startsWith("1.0,"))];
    const path = join(tempDir(), "single_obs.csv");
    writeFileSync(path, kept.join("\n") + "\n");
    expect(() => buildErrorCurves(readSweep(path))).toThrow(/at least 2 observation durations/);
  });
});
