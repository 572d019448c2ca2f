/**
 * Strict reader for the simulator's CSV output.
 *
 * The schema is a fixed header row followed by numeric rows; anything else
 * (missing columns, non-numeric cells, zero data rows) is a SchemaMismatch.
 * Figures never recompute physics, so this is the only ingestion point.
 */

export class SchemaMismatch extends Error {}

export interface Table {
  columns: string[];
  data: Map<string, number[]>;
  rows: number;
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new SchemaMismatch("empty file: row count 0");
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  if (columns.some((c) => c.length === 0)) {
    throw new SchemaMismatch(`malformed header: ${lines[0]}`);
  }
  const data = new Map<string, number[]>(columns.map((c) => [c, []]));
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== columns.length) {
      throw new SchemaMismatch(
        `row ${i} has ${cells.length} cells, expected ${columns.length}`,
      );
    }
    for (let j = 0; j < columns.length; j++) {
      const v = Number(cells[j]);
      if (!Number.isFinite(v)) {
        throw new SchemaMismatch(`row ${i}, column ${columns[j]}: ${cells[j]}`);
      }
      data.get(columns[j])!.push(v);
    }
  }
  const rows = lines.length - 1;
  if (rows === 0) {
    throw new SchemaMismatch("no data rows: row count 0");
  }
  return { columns, data, rows };
}

export function requireColumns(table: Table, needed: string[]): void {
  for (const c of needed) {
    if (!table.data.has(c)) {
      throw new SchemaMismatch(`missing column ${c}; have ${table.columns.join(",")}`);
    }
  }
}

export function column(table: Table, name: string): number[] {
  requireColumns(table, [name]);
  return table.data.get(name)!;
}
