/**
 * Reader for the experiment trace CSV schema:
 *   '#'-prefixed `key=value` metadata lines, then the fixed header
 *   t,loss,local_norm_g,decrement,landmark_updated,landmark_distance,wall_time_us
 * Empty numeric cells encode NaN. This module is the only coupling to the
 * producing library.
 */

import { readFileSync } from 'fs';

export const TRACE_COLUMNS = [
  't',
  'loss',
  'local_norm_g',
  'decrement',
  'landmark_updated',
  'landmark_distance',
  'wall_time_us',
] as const;

export interface Trace {
  name: string;
  metadata: Record<string, string>;
  t: number[];
  loss: number[];
  localNormG: number[];
  decrement: number[];
  landmarkUpdated: number[];
  landmarkDistance: number[];
  wallTimeUs: number[];
}

function parseCell(raw: string): number {
  if (raw === '') return NaN;
  const v = Number(raw);
  if (Number.isNaN(v)) throw new Error(`not a number: '${raw}'`);
  return v;
}

export function parseTrace(text: string, name: string): Trace {
  const metadata: Record<string, string> = {};
  const body: string[] = [];
  for (const line of text.split('\n')) {
    if (line.startsWith('#')) {
      const stripped = line.slice(1).trim();
      const eq = stripped.indexOf('=');
      if (eq > 0) metadata[stripped.slice(0, eq).trim()] = stripped.slice(eq + 1);
    } else if (line.trim() !== '') {
      body.push(line);
    }
  }
  if (body.length === 0) throw new Error(`${name}: empty trace file (no header row)`);
  const header = body[0].split(',');
  const missing = TRACE_COLUMNS.filter((c) => !header.includes(c));
  if (missing.length > 0) {
    throw new Error(`${name}: missing column(s): ${missing.join(', ')}`);
  }
  const index = TRACE_COLUMNS.map((c) => header.indexOf(c));
  const cols: number[][] = TRACE_COLUMNS.map(() => []);
  for (let i = 1; i < body.length; i++) {
    const fields = body[i].split(',');
    if (fields.length !== header.length) {
      throw new Error(`${name}: row ${i} has ${fields.length} fields, expected ${header.length}`);
    }
    for (let k = 0; k < TRACE_COLUMNS.length; k++) {
      try {
        cols[k].push(parseCell(fields[index[k]]));
      } catch (err) {
        throw new Error(`${name}: row ${i}, column ${TRACE_COLUMNS[k]}: ${(err as Error).message}`);
      }
    }
  }
  return {
    name,
    metadata,
    t: cols[0],
    loss: cols[1],
    localNormG: cols[2],
    decrement: cols[3],
    landmarkUpdated: cols[4],
    landmarkDistance: cols[5],
    wallTimeUs: cols[6],
  };
}

export function loadTrace(path: string): Trace {
  return parseTrace(readFileSync(path, 'utf8'), path);
}

/**
 * Cumulative regret series. Per-round comparator losses are not part of the
 * schema, so intermediate points spread the recorded comparator total
 * uniformly; the endpoint equals the recorded final regret exactly.
 * Falls back to plain cumulative loss when no comparator was recorded.
 */
export function regretSeries(trace: Trace): { values: number[]; exact: boolean } {
  const total = trace.metadata['comparator_total_loss'];
  const T = trace.loss.length;
  const perRound = total === undefined ? 0 : Number(total) / T;
  const values: number[] = [];
  let acc = 0;
  for (let i = 0; i < T; i++) {
    acc += trace.loss[i] - perRound;
    values.push(acc);
  }
  return { values, exact: total !== undefined };
}

export function cumulativeLandmarks(trace: Trace): number[] {
  const out: number[] = [];
  let acc = 0;
  for (const u of trace.landmarkUpdated) {
    acc += u;
    out.push(acc);
  }
  return out;
}
