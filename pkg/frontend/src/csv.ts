/**
 * Reader for the schema-versioned CSVs produced by the helmtrap CLI.
 *
 * Files start with `# schema=<name> v<version>`, then a header row, then
 * plain comma-separated numeric/string rows (no quoting).
 */

import { readFileSync } from "node:fs";

export interface Table {
  schema: string;
  columns: string[];
  rows: string[][];
}

export class SchemaError extends Error {}

export function readTable(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch {
    throw new SchemaError(`cannot read CSV file: ${path}`);
  }
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length < 2 || !lines[0].startsWith("# schema=")) {
    throw new SchemaError(`${path}: missing '# schema=' header`);
  }
  const schema = lines[0].slice("# schema=".length).split(/\s+/)[0];
  const columns = lines[1].split(",");
  const rows = lines.slice(2).map((l) => l.split(","));
  return { schema, columns, rows };
}

/** Extract named columns as numbers, failing fast on a missing column. */
export function numericColumns(
  table: Table,
  names: string[],
  path = "<csv>",
): number[][] {
  const idx = names.map((name) => {
    const i = table.columns.indexOf(name);
    if (i < 0) {
      throw new SchemaError(
        `${path}: required column '${name}' missing from schema '${table.schema}'`,
      );
    }
    return i;
  });
  return table.rows.map((row) =>
    idx.map((i) => {
      const v = Number(row[i]);
      if (Number.isNaN(v)) {
        throw new SchemaError(`${path}: non-numeric value '${row[i]}'`);
      }
      return v;
    }),
  );
}

/** Extract one column as strings. */
export function stringColumn(table: Table, name: string, path = "<csv>"): string[] {
  const i = table.columns.indexOf(name);
  if (i < 0) {
    throw new SchemaError(`${path}: required column '${name}' missing`);
  }
  return table.rows.map((r) => r[i]);
}
