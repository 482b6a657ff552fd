import { describe, expect, it } from 'vitest';

import { decodePng, encodePng } from '../src/png.js';

function checkerboard(width: number, height: number): Uint8Array {
  const rgb = new Uint8Array(width * height * 3);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const v = (x + y) % 2 === 0 ? 255 : 0;
      const i = (y * width + x) * 3;
      rgb[i] = v;
      rgb[i + 1] = (x * 37) % 256;
      rgb[i + 2] = (y * 91) % 256;
    }
  }
  return rgb;
}

describe('png codec', () => {
  it('round-trips pixels exactly', () => {
    const rgb = checkerboard(23, 17);
    const png = encodePng(23, 17, rgb);
    const back = decodePng(png);
    expect(back.width).toBe(23);
    expect(back.height).toBe(17);
    expect(Buffer.from(back.rgb).equals(Buffer.from(rgb))).toBe(true);
  });

  it('starts with the PNG signature', () => {
    const png = encodePng(2, 2, new Uint8Array(12));
    expect([...png.subarray(0, 8)]).toEqual([137, 80, 78, 71, 13, 10, 26, 10]);
  });

  it('is deterministic', () => {
    const rgb = checkerboard(40, 30);
    expect(encodePng(40, 30, rgb).equals(encodePng(40, 30, rgb))).toBe(true);
  });

  it('rejects a mismatched buffer length', () => {
    expect(() => encodePng(4, 4, new Uint8Array(5))).toThrow(/5 bytes, expected 48/);
  });

  it('rejects a truncated file', () => {
    const png = encodePng(8, 8, new Uint8Array(8 * 8 * 3));
    expect(() => decodePng(png.subarray(0, 20))).toThrow();
  });
});
