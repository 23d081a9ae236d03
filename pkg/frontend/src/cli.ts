import { FIGURE_KINDS, FigureKind } from './charts.js';
import { renderFile } from './render.js';

function usage(): never {
  console.error('usage: render --csv <file> --kind <xi_sweep|algo_compare|parallelism> --out <file.svg>');
  process.exit(2);
}

function parseArgs(argv: string[]): { csv: string; kind: FigureKind; out: string } {
  const values = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (!flag.startsWith('--') || value === undefined) usage();
    values.set(flag.slice(2), value);
  }
  const csv = values.get('csv');
  const kind = values.get('kind');
  const out = values.get('out');
  if (!csv || !kind || !out) usage();
  if (!(FIGURE_KINDS as readonly string[]).includes(kind)) {
    console.error(`unknown kind "${kind}" (expected one of ${FIGURE_KINDS.join(', ')})`);
    process.exit(2);
  }
  return { csv, kind: kind as FigureKind, out };
}

const args = parseArgs(process.argv.slice(2));
try {
  const series = renderFile(args.csv, args.kind, args.out);
  console.log(`wrote ${args.out} (${series} series)`);
} catch (err) {
  console.error(`error: ${err instanceof Error ? err.message : err}`);
  process.exit(1);
}
