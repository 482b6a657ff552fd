/**
 * Software raster canvas: RGB pixel buffer with line, rect, circle, and
 * bitmap-text primitives, plus a Plot helper that maps data coordinates
 * into a framed, ticked axes box. Everything is integer pixel math on
 * fixed palettes, so rendering the same inputs yields identical bytes.
 */

import { encodePng } from './png.js';
import { glyphFor, textWidth, GLYPH_ADVANCE, GLYPH_HEIGHT, GLYPH_WIDTH } from './font.js';
import { BLACK, GRAY, Rgb, WHITE } from './colors.js';

export class Raster {
  readonly width: number;
  readonly height: number;
  readonly data: Uint8Array;

  constructor(width: number, height: number, background: Rgb = WHITE) {
    if (!Number.isInteger(width) || !Number.isInteger(height) || width <= 0 || height <= 0) {
      throw new Error(`raster size must be positive integers, got ${width}x${height}`);
    }
    this.width = width;
    this.height = height;
    this.data = new Uint8Array(width * height * 3);
    for (let i = 0; i < width * height; i++) {
      this.data[i * 3] = background[0];
      this.data[i * 3 + 1] = background[1];
      this.data[i * 3 + 2] = background[2];
    }
  }

  set(x: number, y: number, color: Rgb): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = (y * this.width + x) * 3;
    this.data[i] = color[0];
    this.data[i + 1] = color[1];
    this.data[i + 2] = color[2];
  }

  get(x: number, y: number): Rgb {
    const i = (y * this.width + x) * 3;
    return [this.data[i]!, this.data[i + 1]!, this.data[i + 2]!];
  }

  fillRect(x: number, y: number, w: number, h: number, color: Rgb): void {
    const x0 = Math.max(0, x);
    const y0 = Math.max(0, y);
    const x1 = Math.min(this.width, x + w);
    const y1 = Math.min(this.height, y + h);
    for (let yy = y0; yy < y1; yy++) {
      for (let xx = x0; xx < x1; xx++) {
        this.set(xx, yy, color);
      }
    }
  }

  rect(x: number, y: number, w: number, h: number, color: Rgb): void {
    this.hline(x, x + w - 1, y, color);
    this.hline(x, x + w - 1, y + h - 1, color);
    this.vline(x, y, y + h - 1, color);
    this.vline(x + w - 1, y, y + h - 1, color);
  }

  hline(x0: number, x1: number, y: number, color: Rgb): void {
    const [a, b] = x0 <= x1 ? [x0, x1] : [x1, x0];
    for (let x = a; x <= b; x++) this.set(x, y, color);
  }

  vline(x: number, y0: number, y1: number, color: Rgb): void {
    const [a, b] = y0 <= y1 ? [y0, y1] : [y1, y0];
    for (let y = a; y <= b; y++) this.set(x, y, color);
  }

  /** Bresenham line between integer pixel coordinates. */
  line(x0: number, y0: number, x1: number, y1: number, color: Rgb): void {
    let x = x0;
    let y = y0;
    const dx = Math.abs(x1 - x0);
    const dy = -Math.abs(y1 - y0);
    const sx = x0 < x1 ? 1 : -1;
    const sy = y0 < y1 ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      this.set(x, y, color);
      if (x === x1 && y === y1) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y += sy;
      }
    }
  }

  fillCircle(cx: number, cy: number, r: number, color: Rgb): void {
    for (let dy = -r; dy <= r; dy++) {
      for (let dx = -r; dx <= r; dx++) {
        if (dx * dx + dy * dy <= r * r) this.set(cx + dx, cy + dy, color);
      }
    }
  }

  circle(cx: number, cy: number, r: number, color: Rgb): void {
    // Brute-force ring test keeps corners symmetric at small radii.
    const lo = (r - 0.7) * (r - 0.7);
    const hi = (r + 0.7) * (r + 0.7);
    for (let dy = -r - 1; dy <= r + 1; dy++) {
      for (let dx = -r - 1; dx <= r + 1; dx++) {
        const d2 = dx * dx + dy * dy;
        if (d2 >= lo && d2 <= hi) this.set(cx + dx, cy + dy, color);
      }
    }
  }

  /** Draw text with (x, y) as the top-left corner of the first glyph. */
  drawText(x: number, y: number, text: string, color: Rgb = BLACK, scale = 1): void {
    let cx = x;
    for (const ch of text) {
      const rows = glyphFor(ch);
      for (let r = 0; r < GLYPH_HEIGHT; r++) {
        for (let c = 0; c < GLYPH_WIDTH; c++) {
          if (rows[r]![c] === '#') {
            this.fillRect(cx + c * scale, y + r * scale, scale, scale, color);
          }
        }
      }
      cx += GLYPH_ADVANCE * scale;
    }
  }

  drawTextCentered(cx: number, y: number, text: string, color: Rgb = BLACK, scale = 1): void {
    this.drawText(cx - Math.floor(textWidth(text, scale) / 2), y, text, color, scale);
  }

  /** Vertical text reading bottom-to-top; (x, y) is the bottom-left corner. */
  drawTextVertical(x: number, y: number, text: string, color: Rgb = BLACK, scale = 1): void {
    let cy = y;
    for (const ch of text) {
      const rows = glyphFor(ch);
      for (let r = 0; r < GLYPH_HEIGHT; r++) {
        for (let c = 0; c < GLYPH_WIDTH; c++) {
          if (rows[r]![c] === '#') {
            this.fillRect(x + r * scale, cy - (c + 1) * scale, scale, scale, color);
          }
        }
      }
      cy -= GLYPH_ADVANCE * scale;
    }
  }

  png(): Buffer {
    return encodePng(this.width, this.height, this.data);
  }
}

export interface Extent {
  min: number;
  max: number;
}

export function extentOf(values: readonly number[]): Extent {
  let min = Infinity;
  let max = -Infinity;
  for (const v of values) {
    if (!Number.isFinite(v)) continue;
    if (v < min) min = v;
    if (v > max) max = v;
  }
  if (min > max) return { min: 0, max: 1 };
  return { min, max };
}

export function padExtent(e: Extent, frac = 0.05): Extent {
  const span = e.max - e.min;
  if (span === 0) {
    const pad = e.min === 0 ? 1 : Math.abs(e.min) * 0.1;
    return { min: e.min - pad, max: e.max + pad };
  }
  return { min: e.min - span * frac, max: e.max + span * frac };
}

/** Round tick positions at a 1/2/5 step covering [min, max]. */
export function niceTicks(e: Extent, target = 5): number[] {
  const span = e.max - e.min;
  if (span <= 0 || !Number.isFinite(span)) return [e.min];
  const raw = span / Math.max(1, target);
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  const ticks: number[] = [];
  const first = Math.ceil(e.min / step) * step;
  for (let v = first; v <= e.max + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

export function formatTick(v: number, step: number): string {
  if (Math.abs(v) >= 1e5 || (v !== 0 && Math.abs(v) < 1e-3)) {
    return v.toExponential(1).replace('e+', 'e');
  }
  const decimals = Math.max(0, -Math.floor(Math.log10(step) + 1e-9));
  return v.toFixed(Math.min(6, decimals));
}

export interface Box {
  x: number;
  y: number;
  w: number;
  h: number;
}

/** A framed axes region mapping data coordinates into a pixel box. */
export class Plot {
  readonly raster: Raster;
  readonly box: Box;
  readonly xext: Extent;
  readonly yext: Extent;

  constructor(raster: Raster, box: Box, xext: Extent, yext: Extent) {
    this.raster = raster;
    this.box = box;
    this.xext = xext;
    this.yext = yext;
  }

  px(x: number): number {
    const t = (x - this.xext.min) / (this.xext.max - this.xext.min);
    return this.box.x + Math.round(t * (this.box.w - 1));
  }

  py(y: number): number {
    const t = (y - this.yext.min) / (this.yext.max - this.yext.min);
    return this.box.y + this.box.h - 1 - Math.round(t * (this.box.h - 1));
  }

  inside(x: number, y: number): boolean {
    return x >= this.xext.min && x <= this.xext.max && y >= this.yext.min && y <= this.yext.max;
  }

  frame(opts: { title?: string; xlabel?: string; ylabel?: string; ticks?: boolean } = {}): void {
    const { box, raster } = this;
    raster.rect(box.x - 1, box.y - 1, box.w + 2, box.h + 2, BLACK);
    if (opts.ticks !== false) {
      const xticks = niceTicks(this.xext);
      const xstep = xticks.length > 1 ? xticks[1]! - xticks[0]! : 1;
      for (const t of xticks) {
        const px = this.px(t);
        raster.vline(px, box.y + box.h, box.y + box.h + 3, BLACK);
        raster.drawTextCentered(px, box.y + box.h + 6, formatTick(t, xstep), GRAY);
      }
      const yticks = niceTicks(this.yext);
      const ystep = yticks.length > 1 ? yticks[1]! - yticks[0]! : 1;
      for (const t of yticks) {
        const py = this.py(t);
        raster.hline(box.x - 4, box.x - 2, py, BLACK);
        const label = formatTick(t, ystep);
        raster.drawText(box.x - 7 - textWidth(label), py - 3, label, GRAY);
      }
    }
    if (opts.title) {
      raster.drawTextCentered(box.x + Math.floor(box.w / 2), box.y - 14, opts.title, BLACK);
    }
    if (opts.xlabel) {
      raster.drawTextCentered(box.x + Math.floor(box.w / 2), box.y + box.h + 18, opts.xlabel, BLACK);
    }
    if (opts.ylabel) {
      raster.drawTextVertical(
        Math.max(2, box.x - 46),
        box.y + Math.floor(box.h / 2) + Math.floor(textWidth(opts.ylabel) / 2),
        opts.ylabel,
        BLACK,
      );
    }
  }
}
