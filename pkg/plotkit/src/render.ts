/**
 * PlotJob: one or more input CSVs, a plot kind, and an output image path.
 * render() parses the inputs against their schemas, draws, and returns
 * PNG bytes. All numbers come from the CSVs; nothing is recomputed.
 */

import { basename } from 'node:path';

import { Raster } from './canvas.js';
import {
  SchemaError,
  parseLandscape,
  parseLog,
  parseMixture,
  parseOverlap,
  parseSamples,
  readText,
} from './csv.js';
import { renderCurves } from './curves.js';
import { LandscapePanel, renderLandscape } from './landscape.js';
import { renderOverlap } from './overlap.js';
import { renderScatter } from './scatter.js';

export const PLOT_KINDS = ['landscape', 'scatter', 'curves', 'overlap-matrix'] as const;
export type PlotKind = (typeof PLOT_KINDS)[number];

export interface PlotJob {
  kind: PlotKind;
  /** Input CSVs; landscape accepts several (one panel each), others one. */
  inputs: string[];
  /** Output image path. */
  output: string;
  /** Figure title, or per-panel titles for multi-input landscape jobs. */
  titles?: string[];
  xlabel?: string;
  ylabel?: string;
  /** Optional true-mixture CSV overlaid on scatter plots. */
  mixture?: string;
}

function defaultTitle(path: string): string {
  return basename(path).replace(/\.csv$/, '');
}

export function render(job: PlotJob): Buffer {
  if (job.inputs.length === 0) {
    throw new SchemaError('no input CSV given');
  }
  if (job.kind !== 'landscape' && job.inputs.length !== 1) {
    throw new SchemaError(`plot kind '${job.kind}' takes exactly one input CSV`);
  }
  let raster: Raster;
  switch (job.kind) {
    case 'landscape': {
      const panels: LandscapePanel[] = job.inputs.map((path, i) => ({
        table: parseLandscape(readText(path), path),
        title: job.titles?.[i] ?? defaultTitle(path),
      }));
      raster = renderLandscape(panels, { xlabel: job.xlabel, ylabel: job.ylabel });
      break;
    }
    case 'scatter': {
      const samples = parseSamples(readText(job.inputs[0]!), job.inputs[0]!);
      const mixture = job.mixture ? parseMixture(readText(job.mixture), job.mixture) : null;
      raster = renderScatter(samples, mixture, {
        title: job.titles?.[0] ?? defaultTitle(job.inputs[0]!),
        xlabel: job.xlabel,
        ylabel: job.ylabel,
      });
      break;
    }
    case 'curves': {
      const log = parseLog(readText(job.inputs[0]!), job.inputs[0]!);
      raster = renderCurves(log, {
        title: job.titles?.[0],
        xlabel: job.xlabel,
        ylabel: job.ylabel,
      });
      break;
    }
    case 'overlap-matrix': {
      const table = parseOverlap(readText(job.inputs[0]!), job.inputs[0]!);
      raster = renderOverlap(table, {
        title: job.titles?.[0],
        xlabel: job.xlabel,
        ylabel: job.ylabel,
      });
      break;
    }
    default: {
      const bad: never = job.kind;
      throw new SchemaError(`unknown plot kind '${bad as string}'`);
    }
  }
  return raster.png();
}
