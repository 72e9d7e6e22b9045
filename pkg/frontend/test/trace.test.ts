import { describe, expect, it } from 'vitest';
import { join } from 'path';
import { loadTrace, parseTrace, regretSeries, cumulativeLandmarks } from '../src/trace';

const FIXTURES = join(__dirname, '..', 'fixtures');

describe('trace parsing', () => {
  it('reads a bundled portfolio trace', () => {
    const tr = loadTrace(join(FIXTURES, 'portfolio_T1000.csv'));
    expect(tr.t.length).toBe(1000);
    expect(tr.t[0]).toBe(1);
    expect(tr.t[999]).toBe(1000);
    expect(Number(tr.metadata['T'])).toBe(1000);
    expect(tr.metadata['eta']).toBeDefined();
    expect(tr.loss.every(Number.isFinite)).toBe(true);
  });

  it('decodes empty decrement cells as NaN', () => {
    const tr = loadTrace(join(FIXTURES, 'portfolio_T1000.csv'));
    expect(tr.decrement.some(Number.isNaN)).toBe(true);
  });

  it('names missing columns', () => {
    expect(() => parseTrace('t,loss\n1,0.5\n', 'x.csv')).toThrow(/local_norm_g/);
  });

  it('rejects empty files', () => {
    expect(() => parseTrace('', 'empty.csv')).toThrow(/empty/);
  });

  it('rejects ragged rows', () => {
    const header = 't,loss,local_norm_g,decrement,landmark_updated,landmark_distance,wall_time_us';
    expect(() => parseTrace(`${header}\n1,2\n`, 'r.csv')).toThrow(/row 1/);
  });
});

describe('derived series', () => {
  it('regret endpoint matches the recorded final regret', () => {
    const tr = loadTrace(join(FIXTURES, 'portfolio_T4000.csv'));
    const { values, exact } = regretSeries(tr);
    expect(exact).toBe(true);
    const recorded = Number(tr.metadata['final_regret']);
    expect(values[values.length - 1]).toBeCloseTo(recorded, 6);
  });

  it('zero-loss trace gives a flat zero regret curve', () => {
    const tr = loadTrace(join(FIXTURES, 'zero_loss_T200.csv'));
    const { values } = regretSeries(tr);
    expect(Math.max(...values.map(Math.abs))).toBeLessThan(1e-12);
    expect(cumulativeLandmarks(tr).at(-1)).toBe(0);
  });

  it('cumulative landmarks are monotone and end at the recorded total', () => {
    const tr = loadTrace(join(FIXTURES, 'portfolio_T2000.csv'));
    const cum = cumulativeLandmarks(tr);
    for (let i = 1; i < cum.length; i++) expect(cum[i]).toBeGreaterThanOrEqual(cum[i - 1]);
    expect(cum.at(-1)).toBe(Number(tr.metadata['landmark_updates']));
  });
});
