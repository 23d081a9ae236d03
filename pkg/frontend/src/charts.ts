import type { EChartsOption, SeriesOption } from 'echarts';
import { groupBy, requireColumns, SweepRecord } from './csv.js';

export const FIGURE_KINDS = ['xi_sweep', 'algo_compare', 'parallelism'] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

function num(row: SweepRecord, column: string): number {
  const value = Number(row[column]);
  if (!Number.isFinite(value)) {
    throw new Error(`non-numeric value in column "${column}": ${row[column]}`);
  }
  return value;
}

function sortedPairs(rows: SweepRecord[], x: string, y: string): [number, number][] {
  return rows
    .map((r): [number, number] => [num(r, x), num(r, y)])
    .sort((a, b) => a[0] - b[0]);
}

/**
 * Threshold sweep: log-threshold x-axis, error on a log axis and wall time
 * on a linear axis, one pair of lines per algorithm.
 */
function xiSweepOption(rows: SweepRecord[]): EChartsOption {
  requireColumns(rows, ['algorithm', 'xi', 'err', 'wall_s']);
  const series: SeriesOption[] = [];
  for (const [algo, group] of groupBy(rows, 'algorithm')) {
    series.push({
      name: `${algo} ERR`,
      type: 'line',
      yAxisIndex: 0,
      data: sortedPairs(group, 'xi', 'err'),
    });
    series.push({
      name: `${algo} T`,
      type: 'line',
      yAxisIndex: 1,
      data: sortedPairs(group, 'xi', 'wall_s'),
    });
  }
  return {
    animation: false,
    title: { text: 'threshold versus error and wall time' },
    legend: { top: 28 },
    xAxis: { type: 'log', name: 'threshold' },
    yAxis: [
      { type: 'log', name: 'max relative error' },
      { type: 'value', name: 'wall time (s)' },
    ],
    series,
  };
}

/** Wall time against achieved error, one line per algorithm. */
function algoCompareOption(rows: SweepRecord[]): EChartsOption {
  requireColumns(rows, ['algorithm', 'err', 'wall_s']);
  const series: SeriesOption[] = [];
  for (const [algo, group] of groupBy(rows, 'algorithm')) {
    series.push({
      name: algo,
      type: 'line',
      data: sortedPairs(group, 'err', 'wall_s'),
    });
  }
  return {
    animation: false,
    title: { text: 'wall time versus error by algorithm' },
    legend: { top: 28 },
    xAxis: { type: 'log', name: 'max relative error', inverse: true },
    yAxis: { type: 'value', name: 'wall time (s)' },
    series,
  };
}

/** Wall time against achieved error, one line per worker count. */
function parallelismOption(rows: SweepRecord[]): EChartsOption {
  requireColumns(rows, ['threads', 'err', 'wall_s']);
  const series: SeriesOption[] = [];
  for (const [threads, group] of groupBy(rows, 'threads')) {
    series.push({
      name: `${threads} workers`,
      type: 'line',
      data: sortedPairs(group, 'err', 'wall_s'),
    });
  }
  return {
    animation: false,
    title: { text: 'wall time versus error by parallelism' },
    legend: { top: 28 },
    xAxis: { type: 'log', name: 'max relative error', inverse: true },
    yAxis: { type: 'value', name: 'wall time (s)' },
    series,
  };
}

export function buildOption(rows: SweepRecord[], kind: FigureKind): EChartsOption {
  switch (kind) {
    case 'xi_sweep':
      return xiSweepOption(rows);
    case 'algo_compare':
      return algoCompareOption(rows);
    case 'parallelism':
      return parallelismOption(rows);
    default:
      throw new Error(`unknown figure kind "${kind}"`);
  }
}

export function seriesCount(option: EChartsOption): number {
  const series = option.series;
  return Array.isArray(series) ? series.length : series ? 1 : 0;
}
