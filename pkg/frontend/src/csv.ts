import { readFileSync } from 'fs';
import { parse } from 'papaparse';

export type FigureKind = 'order' | 'drift' | 'sweep';

export const FIGURE_KINDS: FigureKind[] = ['order', 'drift', 'sweep'];

/** Result-CSV schemas, keyed by the column set each figure kind accepts. */
export const SCHEMAS: Record<FigureKind, string[][]> = {
  order: [['method', 'tau', 'h1_error', 'wall_time_s', 'fp_iter_mean', 'status']],
  drift: [
    ['method', 'time', 'momentum_err', 'hamiltonian_err', 'status'],
    ['method', 'time', 'pairing_err', 'status'],
  ],
  sweep: [['tau', 'max_hamiltonian_err', 'status']],
};

export interface ResultRow {
  [column: string]: string;
}

export interface ResultTable {
  columns: string[];
  rows: ResultRow[];
}

export class SchemaError extends Error {}

function columnDiff(expected: string[], found: string[]): string {
  const missing = expected.filter((c) => !found.includes(c));
  const extra = found.filter((c) => !expected.includes(c));
  const parts: string[] = [];
  if (missing.length > 0) parts.push(`missing [${missing.join(', ')}]`);
  if (extra.length > 0) parts.push(`unexpected [${extra.join(', ')}]`);
  return parts.join('; ') || 'column order differs';
}

/** Parse a result CSV and validate its header against the figure kind. */
export function readTable(path: string, kind: FigureKind): ResultTable {
  const text = readFileSync(path, 'utf8');
  const parsed = parse<ResultRow>(text.trim(), { header: true, skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`${path}: ${parsed.errors[0].message}`);
  }
  const found = parsed.meta.fields ?? [];
  const candidates = SCHEMAS[kind];
  const match = candidates.find(
    (expected) =>
      expected.length === found.length && expected.every((c, i) => c === found[i]),
  );
  if (!match) {
    const diffs = candidates
      .map((expected) => columnDiff(expected, found))
      .join(' | ');
    throw new SchemaError(
      `${path}: header does not match any ${kind} schema: ${diffs}`,
    );
  }
  if (parsed.data.length === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }
  return { columns: found, rows: parsed.data };
}

/** Parse a cell as a finite number, or return null for blanks and NaNs. */
export function numeric(row: ResultRow, column: string): number | null {
  const raw = row[column];
  if (raw === undefined || raw === '') return null;
  const value = Number(raw);
  return Number.isFinite(value) ? value : null;
}
