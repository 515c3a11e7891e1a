import { readFileSync } from "fs";
import Papa from "papaparse";

export interface Table {
  path: string;
  header: string[];
  /** rows[i][j] is column j of data row i, NaN where the cell is not numeric */
  rows: number[][];
}

/** Input problems the CLI maps to a usage exit (bad header, empty data). */
export class InputError extends Error {}

export function readTable(path: string): Table {
  const text = readFileSync(path, "utf8");
  if (text.trim().length === 0) {
    throw new InputError(`${path}: empty file`);
  }
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new InputError(`${path}: ${parsed.errors[0].message}`);
  }
  const grid = parsed.data;
  const header = grid[0].map((h) => h.trim());
  const rows = grid.slice(1).map((cells) => cells.map((c) => Number(c)));
  for (const row of rows) {
    if (row.length !== header.length) {
      throw new InputError(`${path}: row has ${row.length} cells, header has ${header.length}`);
    }
  }
  return { path, header, rows };
}

/** Index of each required column, erroring with the first missing name. */
export function requireColumns(table: Table, names: string[]): Map<string, number> {
  const index = new Map<string, number>();
  for (const name of names) {
    const j = table.header.indexOf(name);
    if (j < 0) {
      throw new InputError(`${table.path}: missing column "${name}"`);
    }
    index.set(name, j);
  }
  if (table.rows.length === 0) {
    throw new InputError(`${table.path}: no data rows`);
  }
  return index;
}

export function column(table: Table, j: number): number[] {
  return table.rows.map((row) => row[j]);
}
