/**
 * Readers for the harness export schema (figure-data/<figId>/*.csv + meta.json).
 *
 * Every file has one header line; numeric cells are parsed to numbers, the
 * rest stay strings. Missing files are surfaced as errors by the caller;
 * empty tables (header only) are rejected here.
 */

import { readFileSync } from "fs";

export type Row = Record<string, string | number>;

export function parseCsv(text: string): Row[] {
  const lines = text.split("\n").filter((ln) => ln.length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV (no header)");
  }
  const header = lines[0].split(",");
  if (lines.length === 1) {
    throw new Error("empty CSV (header only)");
  }
  return lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new Error(`row ${i + 1} has ${cells.length} cells, expected ${header.length}`);
    }
    const row: Row = {};
    header.forEach((key, j) => {
      const cell = cells[j];
      if (cell === "nan" || cell === "-nan") {
        row[key] = Number.NaN;
        return;
      }
      const num = Number(cell);
      row[key] = cell !== "" && !Number.isNaN(num) ? num : cell;
    });
    return row;
  });
}

export function readCsv(path: string): Row[] {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch (err) {
    throw new Error(`cannot read ${path}: ${(err as Error).message}`);
  }
  return parseCsv(text);
}

export function requireColumns(rows: Row[], columns: string[], label: string): void {
  for (const column of columns) {
    if (!(column in rows[0])) {
      throw new Error(`${label}: missing column '${column}'`);
    }
  }
}

export function num(row: Row, key: string): number {
  const value = row[key];
  if (typeof value !== "number") {
    throw new Error(`expected numeric '${key}', got '${row[key]}'`);
  }
  return value;
}

export function str(row: Row, key: string): string {
  return String(row[key]);
}

export interface Meta {
  figure: string;
  scenarios: string[];
  n_values: number[];
  q_values: number[];
  m_shots: number | null;
  guides: Record<string, string>;
}

export function readMeta(path: string): Meta {
  const raw = JSON.parse(readFileSync(path, "utf-8"));
  if (typeof raw.figure !== "string") {
    throw new Error(`${path}: missing figure id`);
  }
  return raw as Meta;
}

/** Stable group-by preserving first-seen key order. */
export function groupBy<T>(items: T[], key: (item: T) => string): Map<string, T[]> {
  const out = new Map<string, T[]>();
  for (const item of items) {
    const k = key(item);
    const bucket = out.get(k);
    if (bucket) {
      bucket.push(item);
    } else {
      out.set(k, [item]);
    }
  }
  return out;
}
