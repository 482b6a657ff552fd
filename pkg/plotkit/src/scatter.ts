/**
 * Per-class scatter of 2-D sample CSVs, optionally with the true mixture
 * drawn as 1-sigma and 2-sigma circles around each component mean. An
 * empty table (header only) still renders a complete framed figure.
 */

import { Extent, Plot, Raster, extentOf, padExtent } from './canvas.js';
import { BLACK, WHITE, classColor } from './colors.js';
import { MixtureTable, SampleTable, SchemaError } from './csv.js';
import { textWidth } from './font.js';

const WIDTH = 480;
const HEIGHT = 420;
const BOX = { x: 64, y: 36, w: WIDTH - 64 - 20, h: HEIGHT - 36 - 52 };

export function renderScatter(
  samples: SampleTable,
  mixture: MixtureTable | null,
  opts: { title?: string; xlabel?: string; ylabel?: string } = {},
): Raster {
  if (samples.points.length > 0 && samples.dim !== 2) {
    throw new SchemaError(
      `scatter needs 2-D samples, but column 'dim' declares ${samples.dim} coordinates`,
    );
  }
  if (mixture && mixture.dim !== 2) {
    throw new SchemaError(
      `scatter needs a 2-D mixture, but the mixture header declares ${mixture.dim} coordinates`,
    );
  }

  const raster = new Raster(WIDTH, HEIGHT);
  const { xext, yext } = chooseExtents(samples, mixture);
  const plot = new Plot(raster, BOX, xext, yext);

  if (mixture) {
    for (let k = 0; k < mixture.means.length; k++) {
      const [mx, my] = [mixture.means[k]![0]!, mixture.means[k]![1]!];
      const color = classColor(k);
      const cx = plot.px(mx);
      const cy = plot.py(my);
      const rx1 = Math.abs(plot.px(mx + mixture.sigmas[k]!) - cx);
      raster.circle(cx, cy, rx1, color);
      raster.circle(cx, cy, 2 * rx1, color);
      raster.hline(cx - 3, cx + 3, cy, color);
      raster.vline(cx, cy - 3, cy + 3, color);
    }
  }

  for (let i = 0; i < samples.points.length; i++) {
    const [x, y] = [samples.points[i]![0]!, samples.points[i]![1]!];
    if (!Number.isFinite(x) || !Number.isFinite(y)) continue;
    raster.fillCircle(plot.px(x), plot.py(y), 2, classColor(samples.labels[i]!));
  }

  plot.frame({
    title: opts.title ?? 'samples',
    xlabel: opts.xlabel ?? 'x0',
    ylabel: opts.ylabel ?? 'x1',
  });
  drawLegend(raster, samples, mixture);
  return raster;
}

function chooseExtents(
  samples: SampleTable,
  mixture: MixtureTable | null,
): { xext: Extent; yext: Extent } {
  const xs: number[] = [];
  const ys: number[] = [];
  for (const p of samples.points) {
    xs.push(p[0]!);
    ys.push(p[1]!);
  }
  if (mixture) {
    for (let k = 0; k < mixture.means.length; k++) {
      const s = 2 * mixture.sigmas[k]!;
      xs.push(mixture.means[k]![0]! - s, mixture.means[k]![0]! + s);
      ys.push(mixture.means[k]![1]! - s, mixture.means[k]![1]! + s);
    }
  }
  if (xs.length === 0) {
    return { xext: { min: -1, max: 1 }, yext: { min: -1, max: 1 } };
  }
  return { xext: padExtent(extentOf(xs)), yext: padExtent(extentOf(ys)) };
}

function drawLegend(raster: Raster, samples: SampleTable, mixture: MixtureTable | null): void {
  const counts = new Map<number, number>();
  for (const label of samples.labels) counts.set(label, (counts.get(label) ?? 0) + 1);
  if (mixture) {
    for (let k = 0; k < mixture.means.length; k++) {
      if (!counts.has(k)) counts.set(k, 0);
    }
  }
  const labels = [...counts.keys()].sort((a, b) => a - b);
  if (labels.length === 0 || labels.length > 12) return;
  const entries = labels.map((k) => `class ${k} (${counts.get(k)})`);
  const boxW = Math.max(...entries.map((e) => textWidth(e))) + 18;
  const boxH = entries.length * 11 + 6;
  const x = BOX.x + BOX.w - boxW - 4;
  const y = BOX.y + 4;
  raster.fillRect(x, y, boxW, boxH, WHITE);
  raster.rect(x, y, boxW, boxH, BLACK);
  for (let i = 0; i < labels.length; i++) {
    const rowY = y + 4 + i * 11;
    raster.fillRect(x + 4, rowY, 7, 7, classColor(labels[i]!));
    raster.drawText(x + 15, rowY, entries[i]!, BLACK);
  }
}
