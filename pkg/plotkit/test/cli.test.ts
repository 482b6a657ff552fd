import { existsSync, mkdtempSync, readFileSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { fileURLToPath } from 'node:url';

import { afterEach, beforeEach, describe, expect, it } from 'vitest';

import { buildJob, main } from '../src/cli.js';
import { decodePng } from '../src/png.js';

const FIXTURES = join(fileURLToPath(new URL('.', import.meta.url)), 'fixtures');

let tmp: string;
let stderrLines: string[];
let stdoutLines: string[];
let restore: Array<() => void>;

beforeEach(() => {
  tmp = mkdtempSync(join(tmpdir(), 'plotkit-'));
  stderrLines = [];
  stdoutLines = [];
  const errWrite = process.stderr.write.bind(process.stderr);
  const outWrite = process.stdout.write.bind(process.stdout);
  process.stderr.write = ((chunk: string | Uint8Array) => {
    stderrLines.push(String(chunk));
    return true;
  }) as typeof process.stderr.write;
  process.stdout.write = ((chunk: string | Uint8Array) => {
    stdoutLines.push(String(chunk));
    return true;
  }) as typeof process.stdout.write;
  restore = [
    () => {
      process.stderr.write = errWrite;
    },
    () => {
      process.stdout.write = outWrite;
    },
  ];
});

afterEach(() => {
  for (const r of restore) r();
});

function fx(name: string): string {
  return join(FIXTURES, name);
}

describe('argument handling', () => {
  it('requires a known kind', () => {
    expect(main(['--kind', 'pie', '--in', fx('log.csv'), '--out', join(tmp, 'o.png')])).toBe(2);
    expect(stderrLines.join('')).toContain('--kind must be one of');
  });

  it('requires an input and an output', () => {
    expect(main(['--kind', 'curves'])).toBe(2);
    expect(main(['--kind', 'curves', '--in', fx('log.csv')])).toBe(2);
  });

  it('rejects unknown flags with usage help', () => {
    expect(main(['--kind', 'curves', '--in', fx('log.csv'), '--frobnicate', 'x'])).toBe(2);
    expect(stderrLines.join('')).toContain('usage:');
  });

  it('collects repeated --in and --title into the job', () => {
    const job = buildJob([
      '--kind', 'landscape',
      '--in', 'a.csv', '--in', 'b.csv',
      '--title', 'A', '--title', 'B',
      '--out', 'o.png',
    ]);
    expect(job.inputs).toEqual(['a.csv', 'b.csv']);
    expect(job.titles).toEqual(['A', 'B']);
  });
});

describe('end-to-end rendering', () => {
  it('renders a four-panel landscape figure', () => {
    const out = join(tmp, 'landscape.png');
    const code = main([
      '--kind', 'landscape',
      '--in', fx('landscape_fit.csv'),
      '--in', fx('landscape_naive.csv'),
      '--in', fx('landscape_hinge_exponential.csv'),
      '--in', fx('landscape_hinge_reciprocal.csv'),
      '--title', 'fit', '--title', 'naive', '--title', 'exp', '--title', 'recip',
      '--out', out,
    ]);
    expect(code).toBe(0);
    const img = decodePng(readFileSync(out));
    expect(img.height).toBe(328);
    expect(img.width).toBeGreaterThan(4 * 240);
    expect(stdoutLines.join('')).toContain(out);
  });

  it('renders a scatter with mixture contours', () => {
    const out = join(tmp, 'scatter.png');
    expect(
      main([
        '--kind', 'scatter',
        '--in', fx('samples.csv'),
        '--mixture', fx('mixture.csv'),
        '--out', out,
      ]),
    ).toBe(0);
    expect(existsSync(out)).toBe(true);
  });

  it('renders curves and overlap figures', () => {
    expect(main(['--kind', 'curves', '--in', fx('log.csv'), '--out', join(tmp, 'c.png')])).toBe(0);
    expect(
      main(['--kind', 'overlap-matrix', '--in', fx('overlap.csv'), '--out', join(tmp, 'o.png')]),
    ).toBe(0);
  });

  it('writes identical bytes when run twice', () => {
    const a = join(tmp, 'a.png');
    const b = join(tmp, 'b.png');
    const argv = (out: string) => [
      '--kind', 'scatter',
      '--in', fx('samples.csv'),
      '--mixture', fx('mixture.csv'),
      '--out', out,
    ];
    expect(main(argv(a))).toBe(0);
    expect(main(argv(b))).toBe(0);
    expect(readFileSync(a).equals(readFileSync(b))).toBe(true);
  });

  it('renders a header-only samples CSV with exit 0', () => {
    const empty = join(tmp, 'empty.csv');
    writeFileSync(empty, 'dim,label,x0,x1\n');
    const out = join(tmp, 'empty.png');
    expect(main(['--kind', 'scatter', '--in', empty, '--out', out])).toBe(0);
    expect(existsSync(out)).toBe(true);
  });
});

describe('failure modes', () => {
  it('exits 1 naming the offending column on a schema mismatch', () => {
    const bad = join(tmp, 'bad.csv');
    writeFileSync(bad, 'step,total,ddpm,penalty,tau_mean,seconds\n');
    expect(main(['--kind', 'curves', '--in', bad, '--out', join(tmp, 'o.png')])).toBe(1);
    expect(stderrLines.join('')).toContain("column 4 should be 'pcl', found 'penalty'");
  });

  it('exits 1 naming the column for a corrupt value', () => {
    const bad = join(tmp, 'bad.csv');
    writeFileSync(bad, 'dim,label,x0,x1\n2,0,0.1,wat\n');
    expect(main(['--kind', 'scatter', '--in', bad, '--out', join(tmp, 'o.png')])).toBe(1);
    expect(stderrLines.join('')).toContain("column 'x1'");
  });

  it('exits 1 when an input file is missing', () => {
    expect(main(['--kind', 'curves', '--in', join(tmp, 'gone.csv'), '--out', join(tmp, 'o.png')])).toBe(1);
    expect(stderrLines.join('')).toContain('no such file');
  });

  it('exits 1 when a single-input kind gets several inputs', () => {
    expect(
      main(['--kind', 'curves', '--in', fx('log.csv'), '--in', fx('log.csv'), '--out', join(tmp, 'o.png')]),
    ).toBe(1);
    expect(stderrLines.join('')).toContain("plot kind 'curves' takes exactly one input CSV");
  });
});
