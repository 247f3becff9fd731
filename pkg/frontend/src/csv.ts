/**
 * Readers for the nanovisc result file schemas. Everything here is
 * read-only and validates eagerly with descriptive errors; the figure
 * builders can then assume well-formed data.
 */

import { createHash } from "node:crypto";
import { readFileSync } from "node:fs";
import Papa from "papaparse";

export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

export interface TrajectoryFile {
  path: string;
  sha256: string;
  t: number[];
  x: number[];
  y: number[];
  z: number[];
  /** frame spacing in seconds */
  dtS: number;
  /** frames per second implied by the spacing */
  fps: number;
}

export interface SweepRow {
  observation_s: number;
  frames_per_second: number;
  factor: number;
  fps_effective: number;
  sample_count: number;
  rmse_visc_mPas: number;
  predicted_rmse_mPas: number;
  manifest_hash: string;
}

export interface SweepFile {
  path: string;
  sha256: string;
  rows: SweepRow[];
  /** distinct manifest hashes found in the rows (normally exactly one) */
  manifestHashes: string[];
}

export interface StayProbFile {
  path: string;
  sha256: string;
  rows: Array<{ width_m: number; tau_s: number; stay_probability: number }>;
}

function parseRows(path: string, text: string): { header: string[]; rows: string[][] } {
  if (text.trim() === "") {
    throw new SchemaError(`${path}: empty file, expected a header row and data`);
  }
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0]!;
    throw new SchemaError(`${path}: CSV parse error: ${first.message}`);
  }
  const data = parsed.data;
  if (data.length === 0) {
    throw new SchemaError(`${path}: empty file, expected a header row and data`);
  }
  return { header: data[0]!, rows: data.slice(1) };
}

function toNumber(path: string, cell: string | undefined, where: string): number {
  const v = Number(cell);
  if (cell === undefined || cell === "" || !Number.isFinite(v)) {
    throw new SchemaError(`${path}: ${where} is not a finite number, got ${JSON.stringify(cell)}`);
  }
  return v;
}

export function sha256OfFile(path: string): string {
  return createHash("sha256").update(readFileSync(path)).digest("hex");
}

export function readTrajectory(path: string): TrajectoryFile {
  const bytes = readFileSync(path);
  const sha256 = createHash("sha256").update(bytes).digest("hex");
  const { header, rows } = parseRows(path, bytes.toString("utf8"));
  const expected = ["t", "x", "y", "z"];
  if (header.join(",") !== expected.join(",")) {
    throw new SchemaError(
      `${path}: expected header ${expected.join(",")}, got ${header.join(",")}` +
        (header.join(",") === "t,particle,x,y,z" ? " (multi-particle files are not plottable here)" : ""),
    );
  }
  if (rows.length < 2) {
    throw new SchemaError(`${path}: need at least 2 data rows to draw a path, got ${rows.length}`);
  }
  const t: number[] = [];
  const x: number[] = [];
  const y: number[] = [];
  const z: number[] = [];
  rows.forEach((row, i) => {
    if (row.length !== 4) {
      throw new SchemaError(`${path}: row ${i + 2} has ${row.length} fields, expected 4`);
    }
    t.push(toNumber(path, row[0], `row ${i + 2} column t`));
    x.push(toNumber(path, row[1], `row ${i + 2} column x`));
    y.push(toNumber(path, row[2], `row ${i + 2} column y`));
    z.push(toNumber(path, row[3], `row ${i + 2} column z`));
  });
  const dtS = t[1]! - t[0]!;
  if (!(dtS > 0)) {
    throw new SchemaError(`${path}: time column must increase, first step is ${dtS}`);
  }
  for (let i = 1; i < t.length; i++) {
    const step = t[i]! - t[i - 1]!;
    if (Math.abs(step - dtS) > 1e-9 * Math.max(1, Math.abs(dtS))) {
      throw new SchemaError(`${path}: uneven frame spacing at row ${i + 2} (${step} vs ${dtS})`);
    }
  }
  return { path, sha256, t, x, y, z, dtS, fps: 1 / dtS };
}

export function readSweep(path: string): SweepFile {
  const bytes = readFileSync(path);
  const sha256 = createHash("sha256").update(bytes).digest("hex");
  const { header, rows } = parseRows(path, bytes.toString("utf8"));
  const required = [
    "observation_s",
    "frames_per_second",
    "factor",
    "fps_effective",
    "sample_count",
    "rmse_visc_mPas",
    "predicted_rmse_mPas",
    "manifest_hash",
  ];
  const missing = required.filter((c) => !header.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(`${path}: sweep CSV missing columns: ${missing.join(", ")}`);
  }
  if (rows.length === 0) {
    throw new SchemaError(`${path}: sweep CSV has a header but no rows`);
  }
  const col = new Map(header.map((name, i) => [name, i]));
  const out: SweepRow[] = rows.map((row, i) => {
    const cell = (name: string) => row[col.get(name)!];
    const num = (name: string) => toNumber(path, cell(name), `row ${i + 2} column ${name}`);
    const hash = cell("manifest_hash");
    if (!hash || !/^[0-9a-f]{64}$/.test(hash)) {
      throw new SchemaError(`${path}: row ${i + 2} manifest_hash is not a sha256 hex digest`);
    }
    return {
      observation_s: num("observation_s"),
      frames_per_second: num("frames_per_second"),
      factor: num("factor"),
      fps_effective: num("fps_effective"),
      sample_count: num("sample_count"),
      rmse_visc_mPas: num("rmse_visc_mPas"),
      predicted_rmse_mPas: num("predicted_rmse_mPas"),
      manifest_hash: hash,
    };
  });
  const manifestHashes = [...new Set(out.map((r) => r.manifest_hash))];
  return { path, sha256, rows: out, manifestHashes };
}

export function readStayProb(path: string): StayProbFile {
  const bytes = readFileSync(path);
  const sha256 = createHash("sha256").update(bytes).digest("hex");
  const { header, rows } = parseRows(path, bytes.toString("utf8"));
  const expected = ["width_m", "tau_s", "stay_probability"];
  const missing = expected.filter((c) => !header.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(`${path}: stay-probability CSV missing columns: ${missing.join(", ")}`);
  }
  if (rows.length === 0) {
    throw new SchemaError(`${path}: stay-probability CSV has a header but no rows`);
  }
  const col = new Map(header.map((name, i) => [name, i]));
  const out = rows.map((row, i) => {
    const num = (name: string) => toNumber(path, row[col.get(name)!], `row ${i + 2} column ${name}`);
    const entry = {
      width_m: num("width_m"),
      tau_s: num("tau_s"),
      stay_probability: num("stay_probability"),
    };
    if (entry.stay_probability < 0 || entry.stay_probability > 1) {
      throw new SchemaError(
        `${path}: row ${i + 2} stay_probability ${entry.stay_probability} is outside [0, 1]`,
      );
    }
    if (!(entry.width_m > 0) || !(entry.tau_s > 0)) {
      throw new SchemaError(`${path}: row ${i + 2} width_m and tau_s must be positive`);
    }
    return entry;
  });
  return { path, sha256, rows: out };
}
