/** Minimal reader for the comma-separated tables the primary tool emits
 * (plain numeric columns, no quoting). */

export interface Table {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string, source: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length < 2) {
    throw new Error(`${source}: no data rows`);
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new Error(`${source}: row ${i + 2} has ${cells.length} cells, expected ${header.length}`);
    }
    return cells;
  });
  return { header, rows };
}

export function numericColumn(table: Table, name: string, source: string): number[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new Error(`${source}: missing column ${name} (header: ${table.header.join(",")})`);
  }
  return table.rows.map((row, i) => {
    const v = Number(row[idx]);
    if (!Number.isFinite(v)) {
      throw new Error(`${source}: row ${i + 2} column ${name} is not a number: ${row[idx]}`);
    }
    return v;
  });
}
