/**
 * Render the cumulative landmark-update timeline of one trace CSV with a
 * C*sqrt(t) guide.
 *
 * Usage: node dist/plot-landmarks.js trace.csv --out landmarks.svg
 */

import { landmarkFigure, renderToSvgFile } from './figures';
import { loadTrace } from './trace';

export function main(argv: string[]): number {
  let input: string | undefined;
  let out = 'landmarks.svg';
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === '--out') {
      out = argv[++i];
      if (out === undefined) {
        console.error('--out requires a path');
        return 2;
      }
    } else if (input === undefined) {
      input = argv[i];
    } else {
      console.error('plot-landmarks takes a single trace file');
      return 2;
    }
  }
  if (input === undefined) {
    console.error('usage: plot-landmarks <trace.csv> --out <figure.svg>');
    return 2;
  }
  try {
    renderToSvgFile(landmarkFigure(loadTrace(input)), out);
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
