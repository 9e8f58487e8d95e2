/**
 * Minimal CSV reading for the integrator output files. The files are plain
 * comma-separated numbers written by the experiment CLI (no quoting), so the
 * focus here is schema validation with useful diagnostics rather than full
 * CSV generality.
 */

export class CsvSchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "CsvSchemaError";
  }
}

export interface CsvTable {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string, path: string): CsvTable {
  const lines = text
    .split(/\r?\n/)
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new CsvSchemaError(`${path}: file is empty`);
  }
  const header = lines[0].split(",").map((c) => c.trim());
  const rows = lines.slice(1).map((line) => line.split(",").map((c) => c.trim()));
  if (rows.length === 0) {
    throw new CsvSchemaError(`${path}: no data rows below the header`);
  }
  return { header, rows };
}

/** Check the header starts with the expected column names, in order. */
export function requireColumns(
  table: CsvTable,
  expected: string[],
  path: string,
): void {
  for (let i = 0; i < expected.length; i++) {
    if (table.header[i] !== expected[i]) {
      throw new CsvSchemaError(
        `${path}: expected column ${i + 1} to be '${expected[i]}', ` +
          `found '${table.header[i] ?? "<missing>"}' ` +
          `(header: ${table.header.join(",")})`,
      );
    }
  }
}

export function numberAt(
  row: string[],
  col: number,
  colName: string,
  rowIndex: number,
  path: string,
): number {
  const raw = row[col];
  const value = Number(raw);
  if (raw === undefined || raw === "" || !Number.isFinite(value)) {
    throw new CsvSchemaError(
      `${path}: row ${rowIndex + 2}, column '${colName}': ` +
        `expected a finite number, found '${raw ?? "<missing>"}'`,
    );
  }
  return value;
}
