/**
 * Readers for the CSV formats the simulation suite emits. Each reader
 * validates the header and every field against the documented schema and
 * reports mismatches by column name, so a bad file fails loudly instead
 * of rendering garbage. No science happens here: values pass through.
 *
 * Formats:
 *   samples    dim,label,x0,...,x{d-1}
 *   mixture    component,weight,sigma,m0,...,m{d-1}
 *   log        step,total,ddpm,pcl,tau_mean,seconds
 *   landscape  m1,m2,loss   (+ trailing "# argmin,<m1>,<m2>,<loss>" row)
 *   overlap    class,0,1,...,C-1
 */

import { readFileSync } from 'node:fs';

export class SchemaError extends Error {}

function splitRows(text: string): string[][] {
  const rows: string[][] = [];
  for (const line of text.split('\n')) {
    const stripped = line.endsWith('\r') ? line.slice(0, -1) : line;
    if (stripped === '') continue;
    rows.push(stripped.split(','));
  }
  return rows;
}

function checkHeader(file: string, got: string[], want: string[]): void {
  for (let i = 0; i < want.length; i++) {
    if (got[i] !== want[i]) {
      throw new SchemaError(
        `${file}: header column ${i + 1} should be '${want[i]}', found '${got[i] ?? '<missing>'}'`,
      );
    }
  }
  if (got.length > want.length) {
    throw new SchemaError(
      `${file}: unexpected extra header column '${got[want.length]}' after '${want[want.length - 1]}'`,
    );
  }
}

function checkWidth(file: string, line: number, row: string[], cols: string[]): void {
  if (row.length < cols.length) {
    throw new SchemaError(`${file} line ${line}: missing column '${cols[row.length]}'`);
  }
  if (row.length > cols.length) {
    throw new SchemaError(
      `${file} line ${line}: unexpected extra field after column '${cols[cols.length - 1]}'`,
    );
  }
}

/** Parse a float the way the suite writes them (repr, incl. nan/inf). */
function num(file: string, line: number, column: string, raw: string): number {
  if (raw === 'nan') return NaN;
  if (raw === 'inf') return Infinity;
  if (raw === '-inf') return -Infinity;
  if (raw.trim() === '') {
    throw new SchemaError(`${file} line ${line}: column '${column}' is empty`);
  }
  const v = Number(raw);
  if (Number.isNaN(v)) {
    throw new SchemaError(`${file} line ${line}: column '${column}' is not a number: '${raw}'`);
  }
  return v;
}

function int(file: string, line: number, column: string, raw: string): number {
  const v = num(file, line, column, raw);
  if (!Number.isInteger(v)) {
    throw new SchemaError(`${file} line ${line}: column '${column}' is not an integer: '${raw}'`);
  }
  return v;
}

export interface SampleTable {
  dim: number;
  labels: number[];
  points: number[][];
}

export function parseSamples(text: string, file: string): SampleTable {
  const rows = splitRows(text);
  if (rows.length === 0) throw new SchemaError(`${file}: empty file, expected a header row`);
  const header = rows[0]!;
  if (header[0] !== 'dim' || header[1] !== 'label') {
    checkHeader(file, header, ['dim', 'label', 'x0']);
  }
  const dim = header.length - 2;
  const cols = ['dim', 'label', ...Array.from({ length: Math.max(1, dim) }, (_, j) => `x${j}`)];
  checkHeader(file, header, cols);
  const labels: number[] = [];
  const points: number[][] = [];
  for (let i = 1; i < rows.length; i++) {
    const row = rows[i]!;
    checkWidth(file, i + 1, row, cols);
    const d = int(file, i + 1, 'dim', row[0]!);
    if (d !== dim) {
      throw new SchemaError(
        `${file} line ${i + 1}: column 'dim' is ${d} but the header declares ${dim} coordinates`,
      );
    }
    labels.push(int(file, i + 1, 'label', row[1]!));
    const pt: number[] = [];
    for (let j = 0; j < dim; j++) pt.push(num(file, i + 1, `x${j}`, row[2 + j]!));
    points.push(pt);
  }
  return { dim, labels, points };
}

export interface MixtureTable {
  dim: number;
  weights: number[];
  sigmas: number[];
  means: number[][];
}

export function parseMixture(text: string, file: string): MixtureTable {
  const rows = splitRows(text);
  if (rows.length === 0) throw new SchemaError(`${file}: empty file, expected a header row`);
  const header = rows[0]!;
  const dim = Math.max(1, header.length - 3);
  const cols = ['component', 'weight', 'sigma', ...Array.from({ length: dim }, (_, j) => `m${j}`)];
  checkHeader(file, header, cols);
  const weights: number[] = [];
  const sigmas: number[] = [];
  const means: number[][] = [];
  for (let i = 1; i < rows.length; i++) {
    const row = rows[i]!;
    checkWidth(file, i + 1, row, cols);
    const comp = int(file, i + 1, 'component', row[0]!);
    if (comp !== i - 1) {
      throw new SchemaError(
        `${file} line ${i + 1}: column 'component' should be ${i - 1}, found ${comp}`,
      );
    }
    weights.push(num(file, i + 1, 'weight', row[1]!));
    sigmas.push(num(file, i + 1, 'sigma', row[2]!));
    const m: number[] = [];
    for (let j = 0; j < dim; j++) m.push(num(file, i + 1, `m${j}`, row[3 + j]!));
    means.push(m);
  }
  return { dim, weights, sigmas, means };
}

export const LOG_COLUMNS = ['step', 'total', 'ddpm', 'pcl', 'tau_mean', 'seconds'] as const;

export interface LogTable {
  step: number[];
  total: number[];
  ddpm: number[];
  pcl: number[];
  tauMean: number[];
}

export function parseLog(text: string, file: string): LogTable {
  const rows = splitRows(text);
  if (rows.length === 0) throw new SchemaError(`${file}: empty file, expected a header row`);
  const cols = [...LOG_COLUMNS];
  checkHeader(file, rows[0]!, cols);
  const out: LogTable = { step: [], total: [], ddpm: [], pcl: [], tauMean: [] };
  for (let i = 1; i < rows.length; i++) {
    const row = rows[i]!;
    checkWidth(file, i + 1, row, cols);
    out.step.push(int(file, i + 1, 'step', row[0]!));
    out.total.push(num(file, i + 1, 'total', row[1]!));
    out.ddpm.push(num(file, i + 1, 'ddpm', row[2]!));
    out.pcl.push(num(file, i + 1, 'pcl', row[3]!));
    out.tauMean.push(num(file, i + 1, 'tau_mean', row[4]!));
    num(file, i + 1, 'seconds', row[5]!);
  }
  return out;
}

export interface LandscapeTable {
  /** Sorted distinct grid coordinates. */
  m1: number[];
  m2: number[];
  /** loss[i][j] for (m1[i], m2[j]). */
  loss: number[][];
  /** Pass-through of the stored argmin row; never recomputed here. */
  argmin: { m1: number; m2: number; value: number } | null;
}

export function parseLandscape(text: string, file: string): LandscapeTable {
  const rows = splitRows(text);
  if (rows.length === 0) throw new SchemaError(`${file}: empty file, expected a header row`);
  const cols = ['m1', 'm2', 'loss'];
  checkHeader(file, rows[0]!, cols);
  const m1s: number[] = [];
  const m2s: number[] = [];
  const triples: Array<[number, number, number]> = [];
  let argmin: LandscapeTable['argmin'] = null;
  for (let i = 1; i < rows.length; i++) {
    const row = rows[i]!;
    if (row[0]!.startsWith('#')) {
      if (row[0] === '# argmin') {
        checkWidth(file, i + 1, row, ['# argmin', 'm1', 'm2', 'loss']);
        argmin = {
          m1: num(file, i + 1, 'm1', row[1]!),
          m2: num(file, i + 1, 'm2', row[2]!),
          value: num(file, i + 1, 'loss', row[3]!),
        };
      }
      continue;
    }
    checkWidth(file, i + 1, row, cols);
    const a = num(file, i + 1, 'm1', row[0]!);
    const b = num(file, i + 1, 'm2', row[1]!);
    const v = num(file, i + 1, 'loss', row[2]!);
    if (m1s.length === 0 || a !== m1s[m1s.length - 1]!) m1s.push(a);
    if (m1s.length === 1) m2s.push(b);
    triples.push([a, b, v]);
  }
  if (triples.length === 0) throw new SchemaError(`${file}: no grid rows under column 'loss'`);
  if (triples.length !== m1s.length * m2s.length) {
    throw new SchemaError(
      `${file}: column 'm1'/'m2' rows do not form a full grid ` +
        `(${triples.length} rows for ${m1s.length}x${m2s.length})`,
    );
  }
  const loss: number[][] = [];
  for (let i = 0; i < m1s.length; i++) {
    const rowVals: number[] = [];
    for (let j = 0; j < m2s.length; j++) {
      const [a, b, v] = triples[i * m2s.length + j]!;
      if (a !== m1s[i] || b !== m2s[j]) {
        throw new SchemaError(
          `${file}: column 'm1'/'m2' rows are not in row-major grid order near (${a}, ${b})`,
        );
      }
      rowVals.push(v);
    }
    loss.push(rowVals);
  }
  return { m1: m1s, m2: m2s, loss, argmin };
}

export interface OverlapTable {
  classes: number;
  /** values[i][j]: fraction of class-i samples scored as class j. */
  values: number[][];
}

export function parseOverlap(text: string, file: string): OverlapTable {
  const rows = splitRows(text);
  if (rows.length === 0) throw new SchemaError(`${file}: empty file, expected a header row`);
  const header = rows[0]!;
  const classes = header.length - 1;
  const cols = ['class', ...Array.from({ length: Math.max(1, classes) }, (_, j) => `${j}`)];
  checkHeader(file, header, cols);
  if (rows.length - 1 !== classes) {
    throw new SchemaError(
      `${file}: column 'class' has ${rows.length - 1} rows but the header declares ${classes} classes`,
    );
  }
  const values: number[][] = [];
  for (let i = 1; i < rows.length; i++) {
    const row = rows[i]!;
    checkWidth(file, i + 1, row, cols);
    const cls = int(file, i + 1, 'class', row[0]!);
    if (cls !== i - 1) {
      throw new SchemaError(`${file} line ${i + 1}: column 'class' should be ${i - 1}, found ${cls}`);
    }
    const vals: number[] = [];
    for (let j = 0; j < classes; j++) vals.push(num(file, i + 1, `${j}`, row[1 + j]!));
    values.push(vals);
  }
  return { classes, values };
}

export function readText(path: string): string {
  return readFileSync(path, 'utf8');
}
