/**
 * Command line front ends. Three small tools share the same flags:
 *
 *   plot-paths    --in a.csv [--in b.csv ...] --out overlay.svg
 *   plot-errors   --in sweep.csv --out curves.png --format png
 *   plot-stayprob --in stayprob.csv --out heatmap.svg
 *
 * Inputs are only ever read; outputs refuse to replace an existing
 * file unless --force is given. Exit codes: 0 on success, 2 on any
 * input, schema, or output error.
 */

import { existsSync, writeFileSync } from "node:fs";
import { Command } from "commander";
import { readStayProb, readSweep, readTrajectory } from "./csv.js";
import { buildErrorCurves } from "./figures/errors.js";
import { buildPathOverlay } from "./figures/paths.js";
import { buildStayProbHeatmap } from "./figures/stayprob.js";
import { Figure } from "./scene.js";
import { renderPng } from "./raster.js";
import { renderSvg } from "./svg.js";

export type ImageFormat = "png" | "svg";

export interface CommonOptions {
  out: string;
  format?: string;
  force?: boolean;
}

export function resolveFormat(out: string, format?: string): ImageFormat {
  if (format !== undefined) {
    if (format !== "png" && format !== "svg") {
      throw new Error(`--format must be png or svg, got ${format}`);
    }
    return format;
  }
  if (out.toLowerCase().endsWith(".png")) return "png";
  if (out.toLowerCase().endsWith(".svg")) return "svg";
  throw new Error(`cannot infer format from ${out}; pass --format png|svg`);
}

export function writeFigure(figure: Figure, options: CommonOptions): void {
  const format = resolveFormat(options.out, options.format);
  if (existsSync(options.out) && !options.force) {
    throw new Error(`${options.out} already exists; pass --force to replace it`);
  }
  if (format === "svg") {
    writeFileSync(options.out, renderSvg(figure));
  } else {
    writeFileSync(options.out, renderPng(figure));
  }
}

export function runPlotPaths(inputs: string[], options: CommonOptions): void {
  const figure = buildPathOverlay(inputs.map(readTrajectory));
  writeFigure(figure, options);
}

export function runPlotErrors(input: string, options: CommonOptions): void {
  const figure = buildErrorCurves(readSweep(input));
  writeFigure(figure, options);
}

export function runPlotStayProb(input: string, options: CommonOptions): void {
  const figure = buildStayProbHeatmap(readStayProb(input));
  writeFigure(figure, options);
}

function addCommonOptions(cmd: Command): Command {
  return cmd
    .requiredOption("--out <file>", "output image path")
    .option("--format <format>", "png or svg (default: inferred from --out)")
    .option("--force", "replace an existing output file");
}

interface ParsedCommon {
  out: string;
  format?: string;
  force?: boolean;
}

export function plotPathsProgram(): Command {
  const cmd = new Command("plot-paths").description(
    "overlay one or more resolutions of a tracked particle path from trajectory CSVs",
  );
  addCommonOptions(
    cmd.requiredOption("--in <file...>", "trajectory CSV; repeat for an overlay"),
  );
  cmd.action((opts: ParsedCommon & { in: string[] }) => {
    runPlotPaths(opts.in, opts);
  });
  return cmd;
}

export function plotErrorsProgram(): Command {
  const cmd = new Command("plot-errors").description(
    "RMSE against observation duration per resolution factor, from a sweep CSV",
  );
  addCommonOptions(cmd.requiredOption("--in <file>", "sweep results CSV"));
  cmd.action((opts: ParsedCommon & { in: string }) => {
    runPlotErrors(opts.in, opts);
  });
  return cmd;
}

export function plotStayProbProgram(): Command {
  const cmd = new Command("plot-stayprob").description(
    "stay-probability heatmap over a (window width, lag) grid CSV",
  );
  addCommonOptions(cmd.requiredOption("--in <file>", "stay-probability CSV"));
  cmd.action((opts: ParsedCommon & { in: string }) => {
    runPlotStayProb(opts.in, opts);
  });
  return cmd;
}

export function runProgram(program: Command, argv: string[]): number {
  try {
    program.exitOverride();
    program.parse(argv);
    return 0;
  } catch (err) {
    // commander throws CommanderError on --help/usage problems; our own
    // errors carry a message worth printing once, plainly
    const anyErr = err as { code?: string; exitCode?: number; message?: string };
    if (anyErr.code === "commander.helpDisplayed" || anyErr.code === "commander.version") {
      return 0;
    }
    if (typeof anyErr.code === "string" && anyErr.code.startsWith("commander.")) {
      return anyErr.exitCode ?? 2;
    }
    process.stderr.write(`error: ${anyErr.message ?? String(err)}\n`);
    return 2;
  }
}
