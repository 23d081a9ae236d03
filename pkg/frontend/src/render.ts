import { writeFileSync } from 'fs';
import * as echarts from 'echarts';
import type { EChartsOption } from 'echarts';
import { loadCsv } from './csv.js';
import { buildOption, FigureKind } from './charts.js';

export function renderToSvg(option: EChartsOption, width = 900, height = 600): string {
  const chart = echarts.init(null, null, { renderer: 'svg', ssr: true, width, height });
  try {
    chart.setOption(option);
    return chart.renderToSVGString();
  } finally {
    chart.dispose();
  }
}

/** Load a benchmark CSV, build the requested figure, write it as SVG. */
export function renderFile(csvPath: string, kind: FigureKind, outPath: string): number {
  const rows = loadCsv(csvPath);
  const option = buildOption(rows, kind);
  const svg = renderToSvg(option);
  writeFileSync(outPath, svg);
  const series = option.series;
  return Array.isArray(series) ? series.length : 1;
}
