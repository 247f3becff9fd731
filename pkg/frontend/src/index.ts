export {
  SchemaError,
  readStayProb,
  readSweep,
  readTrajectory,
  sha256OfFile,
} from "./csv.js";
export type { StayProbFile, SweepFile, SweepRow, TrajectoryFile } from "./csv.js";
export { buildPathOverlay, SERIES_COLORS } from "./figures/paths.js";
export { buildErrorCurves } from "./figures/errors.js";
export { buildStayProbHeatmap, rampColor } from "./figures/stayprob.js";
export { renderSvg } from "./svg.js";
export { renderPng } from "./raster.js";
export type { Figure, PolylineItem, RectItem, SceneItem, TextItem } from "./scene.js";
export {
  formatTick,
  linearScale,
  linearTicks,
  logScale,
  logTicks,
} from "./scene.js";
export {
  resolveFormat,
  runPlotErrors,
  runPlotPaths,
  runPlotStayProb,
  writeFigure,
} from "./cli.js";
