/**
 * Square heatmap of the class-overlap matrix. Rates live in [0, 1], so
 * the color scale is fixed to that range and cells print their value
 * when the matrix is small enough to stay readable.
 */

import { Raster } from './canvas.js';
import { BLACK, WHITE, rampColor } from './colors.js';
import { OverlapTable } from './csv.js';
import { textWidth } from './font.js';

const CELL = 44;
const LEFT = 72;
const TOP = 48;
const BOTTOM = 24;
const RIGHT = 24;

/** Pixel layout, exported so tests can address cells. */
export const OVERLAP_LAYOUT = { cell: CELL, left: LEFT, top: TOP } as const;

export function renderOverlap(
  table: OverlapTable,
  opts: { title?: string; xlabel?: string; ylabel?: string } = {},
): Raster {
  const c = table.classes;
  const cell = c <= 14 ? CELL : Math.max(8, Math.floor(CELL * (14 / c)));
  const width = LEFT + c * cell + RIGHT;
  const height = TOP + c * cell + BOTTOM + 16;
  const raster = new Raster(width, height);

  for (let i = 0; i < c; i++) {
    for (let j = 0; j < c; j++) {
      const v = table.values[i]![j]!;
      const x = LEFT + j * cell;
      const y = TOP + i * cell;
      const t = Number.isFinite(v) ? Math.min(1, Math.max(0, v)) : 0;
      raster.fillRect(x, y, cell, cell, rampColor(t));
      if (c <= 10 && cell >= 30 && Number.isFinite(v)) {
        const label = v.toFixed(2);
        const dark = t < 0.55;
        raster.drawText(
          x + Math.floor((cell - textWidth(label)) / 2),
          y + Math.floor(cell / 2) - 3,
          label,
          dark ? WHITE : BLACK,
        );
      }
    }
  }
  raster.rect(LEFT - 1, TOP - 1, c * cell + 2, c * cell + 2, BLACK);

  for (let i = 0; i < c; i++) {
    const rowLabel = `${i}`;
    raster.drawText(
      LEFT - 8 - textWidth(rowLabel),
      TOP + i * cell + Math.floor(cell / 2) - 3,
      rowLabel,
      BLACK,
    );
    raster.drawTextCentered(LEFT + i * cell + Math.floor(cell / 2), TOP - 12, `${i}`, BLACK);
  }

  raster.drawTextCentered(
    LEFT + Math.floor((c * cell) / 2),
    TOP + c * cell + 8,
    opts.xlabel ?? 'scored as class',
    BLACK,
  );
  raster.drawTextVertical(
    8,
    TOP + Math.floor((c * cell) / 2) + Math.floor(textWidth(opts.ylabel ?? 'true class') / 2),
    opts.ylabel ?? 'true class',
    BLACK,
  );
  raster.drawTextCentered(
    LEFT + Math.floor((c * cell) / 2),
    TOP - 28,
    opts.title ?? 'class overlap',
    BLACK,
  );
  return raster;
}
