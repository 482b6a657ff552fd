export { encodePng, decodePng } from './png.js';
export { Raster, Plot, extentOf, padExtent, niceTicks, formatTick } from './canvas.js';
export { classColor, rampColor, CLASS_PALETTE } from './colors.js';
export {
  SchemaError,
  parseSamples,
  parseMixture,
  parseLog,
  parseLandscape,
  parseOverlap,
  readText,
} from './csv.js';
export type { SampleTable, MixtureTable, LogTable, LandscapeTable, OverlapTable } from './csv.js';
export { renderLandscape, landscapeSize, LANDSCAPE_LAYOUT } from './landscape.js';
export { renderScatter } from './scatter.js';
export { renderCurves } from './curves.js';
export { renderOverlap, OVERLAP_LAYOUT } from './overlap.js';
export { render, PLOT_KINDS } from './render.js';
export type { PlotJob, PlotKind } from './render.js';
export { main, buildJob, UsageError } from './cli.js';
