/** Fixed palettes so the same data always renders to the same bytes. */

export type Rgb = readonly [number, number, number];

export const WHITE: Rgb = [255, 255, 255];
export const BLACK: Rgb = [0, 0, 0];
export const GRAY: Rgb = [150, 150, 150];
export const LIGHT_GRAY: Rgb = [220, 220, 220];
export const RED: Rgb = [214, 39, 40];

/** Categorical palette for class labels, cycled when classes exceed it. */
export const CLASS_PALETTE: readonly Rgb[] = [
  [31, 119, 180],
  [255, 127, 14],
  [44, 160, 44],
  [214, 39, 40],
  [148, 103, 189],
  [140, 86, 75],
  [227, 119, 194],
  [127, 127, 127],
  [188, 189, 34],
  [23, 190, 207],
];

export function classColor(label: number): Rgb {
  const idx = ((label % CLASS_PALETTE.length) + CLASS_PALETTE.length) % CLASS_PALETTE.length;
  return CLASS_PALETTE[idx]!;
}

/**
 * Sequential ramp for heatmaps: dark blue through teal to light yellow.
 * `t` is clamped to [0, 1]; interpolation is linear between fixed stops.
 */
const RAMP_STOPS: readonly Rgb[] = [
  [13, 8, 135],
  [84, 39, 143],
  [156, 60, 126],
  [214, 97, 87],
  [249, 149, 64],
  [252, 206, 37],
  [240, 249, 33],
];

export function rampColor(t: number): Rgb {
  const x = Number.isFinite(t) ? Math.min(1, Math.max(0, t)) : 0;
  const pos = x * (RAMP_STOPS.length - 1);
  const lo = Math.min(RAMP_STOPS.length - 2, Math.floor(pos));
  const frac = pos - lo;
  const a = RAMP_STOPS[lo]!;
  const b = RAMP_STOPS[lo + 1]!;
  return [
    Math.round(a[0] + (b[0] - a[0]) * frac),
    Math.round(a[1] + (b[1] - a[1]) * frac),
    Math.round(a[2] + (b[2] - a[2]) * frac),
  ];
}
