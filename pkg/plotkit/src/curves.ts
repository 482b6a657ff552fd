/** Training-curve figure: total, denoising, and penalty losses per step. */

import { Plot, Raster, extentOf, padExtent } from './canvas.js';
import { BLACK, Rgb, WHITE, classColor } from './colors.js';
import { LogTable, SchemaError } from './csv.js';
import { textWidth } from './font.js';

const WIDTH = 560;
const HEIGHT = 360;
const BOX = { x: 64, y: 36, w: WIDTH - 64 - 20, h: HEIGHT - 36 - 52 };

interface Series {
  name: string;
  values: number[];
  color: Rgb;
}

export function renderCurves(
  log: LogTable,
  opts: { title?: string; xlabel?: string; ylabel?: string } = {},
): Raster {
  if (log.step.length === 0) {
    throw new SchemaError("training log has no rows under column 'step'");
  }
  const series: Series[] = [
    { name: 'total', values: log.total, color: BLACK },
    { name: 'ddpm', values: log.ddpm, color: classColor(0) },
    { name: 'pcl', values: log.pcl, color: classColor(1) },
  ];
  const raster = new Raster(WIDTH, HEIGHT);
  const xext = padExtent(extentOf(log.step), 0.02);
  const yext = padExtent(extentOf(series.flatMap((s) => s.values)), 0.08);
  const plot = new Plot(raster, BOX, xext, yext);
  plot.frame({
    title: opts.title ?? 'training loss',
    xlabel: opts.xlabel ?? 'step',
    ylabel: opts.ylabel ?? 'loss',
  });

  for (const s of series) {
    let prev: [number, number] | null = null;
    for (let i = 0; i < log.step.length; i++) {
      const v = s.values[i]!;
      if (!Number.isFinite(v)) {
        prev = null;
        continue;
      }
      const px = plot.px(log.step[i]!);
      const py = plot.py(v);
      if (prev) raster.line(prev[0], prev[1], px, py, s.color);
      else raster.fillCircle(px, py, 1, s.color);
      prev = [px, py];
    }
  }

  const boxW = Math.max(...series.map((s) => textWidth(s.name))) + 26;
  const boxH = series.length * 11 + 6;
  const lx = BOX.x + BOX.w - boxW - 4;
  const ly = BOX.y + 4;
  raster.fillRect(lx, ly, boxW, boxH, WHITE);
  raster.rect(lx, ly, boxW, boxH, BLACK);
  for (let i = 0; i < series.length; i++) {
    const rowY = ly + 4 + i * 11;
    raster.hline(lx + 4, lx + 14, rowY + 3, series[i]!.color);
    raster.drawText(lx + 18, rowY, series[i]!.name, BLACK);
  }
  return raster;
}
