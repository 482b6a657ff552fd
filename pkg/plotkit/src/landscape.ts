/**
 * Heatmap panels for loss-landscape grid CSVs. Multiple grids render as
 * side-by-side panels in one figure; each panel gets its own color scale
 * because the surfaces live on very different ranges. The minimum marker
 * comes straight from the stored argmin row.
 */

import { Plot, Raster, formatTick } from './canvas.js';
import { BLACK, LIGHT_GRAY, RED, rampColor } from './colors.js';
import { LandscapeTable } from './csv.js';

export interface LandscapePanel {
  table: LandscapeTable;
  title: string;
}

const PANEL = 240;
const LEFT = 64;
const TOP = 36;
const BOTTOM = 52;
const BAR_GAP = 8;
const BAR_WIDTH = 12;
const PANEL_GAP = 58;
const RIGHT = 20;

/** Pixel layout, exported so tests can address panels and cells. */
export const LANDSCAPE_LAYOUT = {
  panel: PANEL,
  left: LEFT,
  top: TOP,
  barGap: BAR_GAP,
  barWidth: BAR_WIDTH,
  panelGap: PANEL_GAP,
  panelStride: PANEL + BAR_GAP + BAR_WIDTH + PANEL_GAP,
} as const;

export function landscapeSize(panels: number): { width: number; height: number } {
  const per = PANEL + BAR_GAP + BAR_WIDTH + PANEL_GAP;
  return { width: LEFT + per * panels - PANEL_GAP + RIGHT, height: TOP + PANEL + BOTTOM };
}

export function renderLandscape(
  panels: LandscapePanel[],
  labels: { xlabel?: string; ylabel?: string } = {},
): Raster {
  const { width, height } = landscapeSize(panels.length);
  const raster = new Raster(width, height);
  for (let p = 0; p < panels.length; p++) {
    const x0 = LEFT + p * (PANEL + BAR_GAP + BAR_WIDTH + PANEL_GAP);
    drawPanel(raster, panels[p]!, x0, {
      xlabel: labels.xlabel ?? 'm1',
      ylabel: p === 0 ? labels.ylabel ?? 'm2' : undefined,
    });
  }
  return raster;
}

function finiteRange(loss: number[][]): { lo: number; hi: number } {
  let lo = Infinity;
  let hi = -Infinity;
  for (const row of loss) {
    for (const v of row) {
      if (!Number.isFinite(v)) continue;
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (lo > hi) return { lo: 0, hi: 1 };
  if (lo === hi) return { lo: lo - 0.5, hi: hi + 0.5 };
  return { lo, hi };
}

function drawPanel(
  raster: Raster,
  panel: LandscapePanel,
  x0: number,
  labels: { xlabel?: string; ylabel?: string },
): void {
  const { table } = panel;
  const nx = table.m1.length;
  const ny = table.m2.length;
  const box = { x: x0, y: TOP, w: PANEL, h: PANEL };
  const { lo, hi } = finiteRange(table.loss);

  for (let py = 0; py < box.h; py++) {
    const j = ny - 1 - Math.min(ny - 1, Math.floor((py * ny) / box.h));
    for (let px = 0; px < box.w; px++) {
      const i = Math.min(nx - 1, Math.floor((px * nx) / box.w));
      const v = table.loss[i]![j]!;
      const color = Number.isFinite(v) ? rampColor((v - lo) / (hi - lo)) : LIGHT_GRAY;
      raster.set(box.x + px, box.y + py, color);
    }
  }

  // Axes in grid coordinates: cell centers span the stored m1/m2 values.
  const plot = new Plot(
    raster,
    box,
    { min: table.m1[0]!, max: table.m1[nx - 1]! },
    { min: table.m2[0]!, max: table.m2[ny - 1]! },
  );
  plot.frame({ title: panel.title, xlabel: labels.xlabel, ylabel: labels.ylabel });

  if (table.argmin) {
    const mx = plot.px(table.argmin.m1);
    const my = plot.py(table.argmin.m2);
    raster.circle(mx, my, 6, RED);
    raster.hline(mx - 9, mx + 9, my, RED);
    raster.vline(mx, my - 9, my + 9, RED);
  }

  drawColorbar(raster, box.x + PANEL + BAR_GAP, box.y, lo, hi);
}

function drawColorbar(raster: Raster, x: number, y: number, lo: number, hi: number): void {
  for (let py = 0; py < PANEL; py++) {
    const t = 1 - py / (PANEL - 1);
    const color = rampColor(t);
    for (let px = 0; px < BAR_WIDTH; px++) raster.set(x + px, y + py, color);
  }
  raster.rect(x - 1, y - 1, BAR_WIDTH + 2, PANEL + 2, BLACK);
  const step = (hi - lo) / 4 || 1;
  raster.drawText(x + BAR_WIDTH + 3, y - 3, formatTick(hi, step), BLACK);
  raster.drawText(x + BAR_WIDTH + 3, y + PANEL - 4, formatTick(lo, step), BLACK);
}
