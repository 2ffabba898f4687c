/** Parser for the benchmarking harness CSV record format.
 *
 * Records start with `# key=value` comment lines carrying the run
 * configuration, followed by a header row and integer/float count rows.
 */

import Papa from "papaparse";

export interface HarnessRecord {
  config: Record<string, string>;
  columns: string[];
  rows: number[][];
}

export class CsvFormatError extends Error {}

export function parseHarnessCsv(text: string): HarnessRecord {
  const config: Record<string, string> = {};
  const dataLines: string[] = [];
  for (const raw of text.split(/\r?\n/)) {
    if (raw.startsWith("#")) {
      const body = raw.slice(1).trim();
      const eq = body.indexOf("=");
      if (eq > 0) {
        config[body.slice(0, eq).trim()] = body.slice(eq + 1).trim();
      }
    } else if (raw.trim() !== "") {
      dataLines.push(raw);
    }
  }
  if (dataLines.length < 1) {
    throw new CsvFormatError("no header row in CSV record");
  }
  const parsed = Papa.parse<string[]>(dataLines.join("\n"), {
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new CsvFormatError(`malformed CSV: ${parsed.errors[0].message}`);
  }
  const [header, ...body] = parsed.data;
  const columns = header.map((h) => h.trim());
  const rows = body.map((cells, i) => {
    if (cells.length !== columns.length) {
      throw new CsvFormatError(`row ${i + 1} has ${cells.length} cells, ` +
        `expected ${columns.length}`);
    }
    return cells.map((c) => {
      const v = Number(c);
      if (!Number.isFinite(v)) {
        throw new CsvFormatError(`non-numeric cell ${JSON.stringify(c)}`);
      }
      return v;
    });
  });
  if (rows.length === 0) {
    throw new CsvFormatError("CSV record contains no data rows");
  }
  return { config, columns, rows };
}

/** Column values by name; throws when the column is missing. */
export function column(rec: HarnessRecord, name: string): number[] {
  const idx = rec.columns.indexOf(name);
  if (idx < 0) {
    throw new CsvFormatError(
      `column ${JSON.stringify(name)} not in CSV (has ${rec.columns.join(", ")})`);
  }
  return rec.rows.map((r) => r[idx]);
}

/** Signed column sum: entries are "col" (added) or "-col" (subtracted). */
export function combineColumns(rec: HarnessRecord, terms: string[]): number[] {
  const out = new Array(rec.rows.length).fill(0);
  for (const term of terms) {
    const neg = term.startsWith("-");
    const vals = column(rec, neg ? term.slice(1) : term);
    vals.forEach((v, i) => { out[i] += neg ? -v : v; });
  }
  return out;
}
