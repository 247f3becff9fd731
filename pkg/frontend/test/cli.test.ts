/**
 * End-to-end runs of the three installed tools against the compiled
 * output in dist/. Every test also checks the read-only guarantee:
 * input files must be byte-identical before and after a run.
 */

import { spawnSync } from "node:child_process";
import { readFileSync } from "node:fs";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";
import { PNG } from "pngjs";
import { SERIES_COLORS } from "../src/index.js";
import { bytesOf, fixture, tempDir } from "./helpers.js";

const BIN = fileURLToPath(new URL("../dist/bin", import.meta.url));
const TRIO = ["trio_f1.csv", "trio_f2.csv", "trio_f4.csv"].map(fixture);

function run(tool: string, args: string[]): { status: number; stdout: string; stderr: string } {
  const proc = spawnSync(process.execPath, [join(BIN, `${tool}.js`), ...args], {
    encoding: "utf8",
  });
  return { status: proc.status ?? -1, stdout: proc.stdout, stderr: proc.stderr };
}

function snapshotInputs(paths: string[]): Buffer[] {
  return paths.map((p) => bytesOf(p));
}

function expectUntouched(paths: string[], before: Buffer[]): void {
  paths.forEach((p, i) => {
    expect(bytesOf(p).equals(before[i]!)).toBe(true);
  });
}

describe("plot-paths", () => {
  it("overlays the three resolutions of one run without touching the inputs", () => {
    const before = snapshotInputs(TRIO);
    const out = join(tempDir(), "overlay.svg");
    const res = run("plot-paths", ["--in", ...TRIO, "--out", out]);
    expect(res.status).toBe(0);
    const svg = readFileSync(out, "utf8");
    expect(svg).toContain("<svg");
    for (const id of ["path-40fps", "path-20fps", "path-10fps"]) {
      expect(svg).toContain(`class="${id}"`);
    }
    const strokes = SERIES_COLORS.filter((c) => svg.includes(`stroke="${c}"`));
    expect(strokes.length).toBeGreaterThanOrEqual(3);
    expectUntouched(TRIO, before);
  });

  it("renders the same overlay as a png with three exact series colors", () => {
    const before = snapshotInputs(TRIO);
    const out = join(tempDir(), "overlay.png");
    const res = run("plot-paths", ["--in", ...TRIO, "--out", out, "--format", "png"]);
    expect(res.status).toBe(0);
    const png = PNG.sync.read(readFileSync(out));
    expect(png.width).toBe(800);
    const seen = new Set<string>();
    for (let i = 0; i < png.data.length; i += 4) {
      const hex = [png.data[i]!, png.data[i + 1]!, png.data[i + 2]!]
        .map((c) => c.toString(16).padStart(2, "0"))
        .join("");
      seen.add(`#${hex}`);
    }
    for (const color of SERIES_COLORS.slice(0, 3)) {
      expect(seen.has(color)).toBe(true);
    }
    expectUntouched(TRIO, before);
  });

  it("accepts a single input", () => {
    const out = join(tempDir(), "single.svg");
    const res = run("plot-paths", ["--in", TRIO[0]!, "--out", out]);
    expect(res.status).toBe(0);
    expect(readFileSync(out, "utf8")).toContain(`class="path-40fps"`);
  });

  it("reports an empty input as a schema error", () => {
    const out = join(tempDir(), "never.svg");
    const res = run("plot-paths", ["--in", fixture("empty.csv"), "--out", out]);
    expect(res.status).toBe(2);
    expect(res.stderr).toMatch(/empty file/);
  });

  it("rejects multi-particle trajectory files with a pointer", () => {
    const out = join(tempDir(), "never.svg");
    const res = run("plot-paths", ["--in", fixture("multi.csv"), "--out", out]);
    expect(res.status).toBe(2);
    expect(res.stderr).toMatch(/multi-particle/);
  });

  it("refuses to replace an existing output unless forced", () => {
    const out = join(tempDir(), "overlay.svg");
    expect(run("plot-paths", ["--in", TRIO[0]!, "--out", out]).status).toBe(0);
    const blocked = run("plot-paths", ["--in", TRIO[0]!, "--out", out]);
    expect(blocked.status).toBe(2);
    expect(blocked.stderr).toMatch(/--force/);
    expect(run("plot-paths", ["--in", TRIO[0]!, "--out", out, "--force"]).status).toBe(0);
  });

  it("rejects an unknown format", () => {
    const out = join(tempDir(), "overlay.gif");
    const res = run("plot-paths", ["--in", TRIO[0]!, "--out", out, "--format", "gif"]);
    expect(res.status).toBe(2);
    expect(res.stderr).toMatch(/--format must be png or svg/);
  });

  it("requires --out", () => {
    const res = run("plot-paths", ["--in", TRIO[0]!]);
    expect(res.status).not.toBe(0);
    expect(res.stderr).toMatch(/--out/);
  });

  it("prints help and exits cleanly", () => {
    const res = run("plot-paths", ["--help"]);
    expect(res.status).toBe(0);
    expect(res.stdout).toContain("--in");
  });
});

describe("plot-errors", () => {
  it("draws measured curves with the dashed reference, read-only", () => {
    const input = fixture("sweep.csv");
    const before = snapshotInputs([input]);
    const out = join(tempDir(), "curves.svg");
    const res = run("plot-errors", ["--in", input, "--out", out]);
    expect(res.status).toBe(0);
    const svg = readFileSync(out, "utf8");
    for (const id of ["measured-f1", "measured-f2", "measured-f4", "prediction-f1"]) {
      expect(svg).toContain(`class="${id}"`);
    }
    expect(svg).toContain("stroke-dasharray");
    expect(svg).toContain("53872efacebc2f840612eab98db74d2500ebb748acb1134bb2ca01fe953b9cfd");
    expectUntouched([input], before);
  });

  it("names the missing columns of a malformed sweep", () => {
    const out = join(tempDir(), "never.svg");
    const res = run("plot-errors", ["--in", fixture("badsweep.csv"), "--out", out]);
    expect(res.status).toBe(2);
    expect(res.stderr).toMatch(/missing columns: rmse_visc_mPas/);
  });
});

describe("plot-stayprob", () => {
  it("renders the heatmap with its colorbar, read-only", () => {
    const input = fixture("stayprob.csv");
    const before = snapshotInputs([input]);
    const out = join(tempDir(), "heatmap.svg");
    const res = run("plot-stayprob", ["--in", input, "--out", out]);
    expect(res.status).toBe(0);
    const svg = readFileSync(out, "utf8");
    expect(svg).toContain(`class="cell"`);
    expect(svg).toContain(`class="colorbar"`);
    expect(svg).toContain("probability of staying inside the window");
    expectUntouched([input], before);
  });

  it("works as a png through extension inference", () => {
    const out = join(tempDir(), "heatmap.png");
    const res = run("plot-stayprob", ["--in", fixture("stayprob.csv"), "--out", out]);
    expect(res.status).toBe(0);
    expect(PNG.sync.read(readFileSync(out)).height).toBe(620);
  });
});
