/**
 * Render regret curves (plus a sqrt(T log T) envelope and a normalized
 * scaling panel) from one or more trace CSVs.
 *
 * Usage: node dist/plot-regret.js trace1.csv [trace2.csv ...] --out regret.svg
 */

import { regretFigure, renderToSvgFile } from './figures';
import { loadTrace } from './trace';

export function main(argv: string[]): number {
  const inputs: string[] = [];
  let out = 'regret.svg';
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === '--out') {
      out = argv[++i];
      if (out === undefined) {
        console.error('--out requires a path');
        return 2;
      }
    } else {
      inputs.push(argv[i]);
    }
  }
  if (inputs.length === 0) {
    console.error('usage: plot-regret <trace.csv> [more.csv ...] --out <figure.svg>');
    return 2;
  }
  try {
    const traces = inputs.map(loadTrace);
    renderToSvgFile(regretFigure(traces), out);
  } catch (err) {
    console.error((err as Error).message);
    return 1;
  }
  console.log(`wrote ${out}`);
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
