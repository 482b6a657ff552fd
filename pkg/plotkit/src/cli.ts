#!/usr/bin/env node
/**
 * plotkit: render the simulation suite's CSV outputs to PNG figures.
 *
 * Usage:
 *   plotkit --kind landscape --in grid_a.csv --in grid_b.csv --out fig.png
 *   plotkit --kind scatter --in samples.csv --mixture mixture.csv --out fig.png
 *   plotkit --kind curves --in log.csv --out fig.png
 *   plotkit --kind overlap-matrix --in overlap.csv --out fig.png
 *
 * Options:
 *   --kind     landscape | scatter | curves | overlap-matrix
 *   --in       input CSV; repeat for multi-panel landscape figures
 *   --out      output PNG path
 *   --title    figure title; repeat to title landscape panels in order
 *   --xlabel   x-axis label
 *   --ylabel   y-axis label
 *   --mixture  true-mixture CSV drawn behind scatter points
 *
 * Exit codes: 0 ok; 1 schema mismatch or unreadable input; 2 bad usage.
 */

import { writeFileSync } from 'node:fs';
import { pathToFileURL } from 'node:url';
import { parseArgs } from 'node:util';

import { SchemaError } from './csv.js';
import { PLOT_KINDS, PlotJob, PlotKind, render } from './render.js';

const USAGE =
  'usage: plotkit --kind <landscape|scatter|curves|overlap-matrix> ' +
  '--in <csv> [--in <csv> ...] --out <png> ' +
  '[--title <t> ...] [--xlabel <l>] [--ylabel <l>] [--mixture <csv>]';

export function buildJob(argv: string[]): PlotJob {
  const { values } = parseArgs({
    args: argv,
    options: {
      kind: { type: 'string' },
      in: { type: 'string', multiple: true },
      out: { type: 'string' },
      title: { type: 'string', multiple: true },
      xlabel: { type: 'string' },
      ylabel: { type: 'string' },
      mixture: { type: 'string' },
    },
    allowPositionals: false,
  });
  const kind = values.kind;
  if (!kind || !(PLOT_KINDS as readonly string[]).includes(kind)) {
    throw new UsageError(`--kind must be one of ${PLOT_KINDS.join(', ')}, got '${kind ?? ''}'`);
  }
  const inputs = values.in ?? [];
  if (inputs.length === 0) throw new UsageError('at least one --in CSV is required');
  if (!values.out) throw new UsageError('--out is required');
  const job: PlotJob = { kind: kind as PlotKind, inputs, output: values.out };
  if (values.title) job.titles = values.title;
  if (values.xlabel !== undefined) job.xlabel = values.xlabel;
  if (values.ylabel !== undefined) job.ylabel = values.ylabel;
  if (values.mixture !== undefined) job.mixture = values.mixture;
  return job;
}

export class UsageError extends Error {}

export function main(argv: string[]): number {
  let job: PlotJob;
  try {
    job = buildJob(argv);
  } catch (err) {
    process.stderr.write(`plotkit: ${(err as Error).message}\n${USAGE}\n`);
    return 2;
  }
  try {
    const png = render(job);
    writeFileSync(job.output, png);
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`plotkit: ${err.message}\n`);
      return 1;
    }
    if ((err as NodeJS.ErrnoException).code === 'ENOENT') {
      process.stderr.write(`plotkit: no such file: ${(err as NodeJS.ErrnoException).path}\n`);
      return 1;
    }
    throw err;
  }
  process.stdout.write(`wrote ${job.output}\n`);
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url === pathToFileURL(process.argv[1]).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
