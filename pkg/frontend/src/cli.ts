#!/usr/bin/env node
import { writeFileSync } from 'fs';
import { FIGURE_KINDS, FigureKind, SchemaError } from './csv';
import { PlotSpec, render } from './figures';

const USAGE =
  'usage: plotgen <order|drift|sweep> <input.csv> -o <out.svg> [--guide-slopes 1,2]';

export function parseArgs(argv: string[]): PlotSpec {
  const positional: string[] = [];
  let output = '';
  let guideSlopes = [1, 2];
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === '-o' || arg === '--output') {
      output = argv[++i] ?? '';
    } else if (arg === '--guide-slopes') {
      const raw = argv[++i] ?? '';
      guideSlopes = raw.split(',').map(Number);
      if (guideSlopes.some((s) => !Number.isFinite(s))) {
        throw new Error(`invalid --guide-slopes value: ${raw}`);
      }
    } else if (arg.startsWith('-')) {
      throw new Error(`unknown option ${arg}`);
    } else {
      positional.push(arg);
    }
  }
  if (positional.length !== 2 || !output) {
    throw new Error(USAGE);
  }
  const [kind, inputCsv] = positional;
  if (!FIGURE_KINDS.includes(kind as FigureKind)) {
    throw new Error(`unknown figure kind ${kind}; expected one of ${FIGURE_KINDS.join(', ')}`);
  }
  return {
    figureKind: kind as FigureKind,
    inputCsv,
    outputImage: output,
    guideSlopes,
  };
}

export function main(argv: string[]): number {
  let spec: PlotSpec;
  try {
    spec = parseArgs(argv);
  } catch (err) {
    console.error((err as Error).message);
    return 2;
  }
  try {
    const result = render(spec);
    writeFileSync(spec.outputImage, result.svg);
    for (const [series, slope] of Object.entries(result.slopes)) {
      console.log(`slope[${series}]=${slope.toFixed(6)}`);
    }
    console.log(`wrote ${spec.outputImage}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
    } else {
      console.error((err as Error).message);
    }
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
