import { readFileSync } from 'fs';
import Papa from 'papaparse';

export interface SweepRecord {
  [column: string]: string | number | boolean | null;
}

/** Parse a benchmark CSV into typed records (header row required). */
export function parseCsv(text: string): SweepRecord[] {
  const parsed = Papa.parse<SweepRecord>(text.trim(), {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new Error(`CSV parse error at row ${first.row}: ${first.message}`);
  }
  return parsed.data;
}

export function loadCsv(path: string): SweepRecord[] {
  return parseCsv(readFileSync(path, 'utf8'));
}

/** Fail fast when a figure kind needs a column the CSV does not carry. */
export function requireColumns(rows: SweepRecord[], columns: string[]): void {
  if (rows.length === 0) {
    throw new Error('CSV contains no data rows');
  }
  const present = new Set(Object.keys(rows[0]));
  for (const column of columns) {
    if (!present.has(column)) {
      throw new Error(`CSV is missing required column "${column}"`);
    }
  }
}

export function groupBy(rows: SweepRecord[], column: string): Map<string, SweepRecord[]> {
  const groups = new Map<string, SweepRecord[]>();
  for (const row of rows) {
    const key = String(row[column]);
    const bucket = groups.get(key);
    if (bucket) {
      bucket.push(row);
    } else {
      groups.set(key, [row]);
    }
  }
  return groups;
}
