/**
 * Reader for the simulation lab's versioned CSV files.
 *
 * Layout: `# key=value` comment headers (including `schema` and `kind`),
 * then a column-name row, then numeric rows. Unknown schema versions are
 * rejected; figures never guess at file contents.
 */

import { readFileSync } from "fs";

export const SCHEMA_VERSION = "v1";

export interface DataFile {
  meta: Record<string, string>;
  columns: Record<string, number[]>;
  header: string[];
}

export function parseCsv(text: string, path = "<string>"): DataFile {
  const meta: Record<string, string> = {};
  const columns: Record<string, number[]> = {};
  let header: string[] | null = null;

  for (const raw of text.split(/\r?\n/)) {
    const line = raw.trim();
    if (!line) continue;
    if (line.startsWith("#")) {
      const body = line.slice(1).trim();
      const eq = body.indexOf("=");
      if (eq > 0) meta[body.slice(0, eq).trim()] = body.slice(eq + 1).trim();
      continue;
    }
    if (header === null) {
      header = line.split(",").map((c) => c.trim());
      for (const name of header) columns[name] = [];
      continue;
    }
    const parts = line.split(",");
    if (parts.length !== header.length) {
      throw new Error(`${path}: row with ${parts.length} fields, expected ${header.length}`);
    }
    header.forEach((name, i) => {
      const v = Number(parts[i]);
      columns[name].push(Number.isNaN(v) ? NaN : v);
    });
  }

  if (meta["schema"] !== SCHEMA_VERSION) {
    throw new Error(`${path}: unsupported schema ${JSON.stringify(meta["schema"])}`);
  }
  if (header === null) throw new Error(`${path}: no data rows`);
  return { meta, columns, header };
}

export function readCsv(path: string): DataFile {
  return parseCsv(readFileSync(path, "utf8"), path);
}

export function requireKind(file: DataFile, ...kinds: string[]): void {
  if (!kinds.includes(file.meta["kind"] ?? "")) {
    throw new Error(`expected CSV kind ${kinds.join("|")}, got ${file.meta["kind"]}`);
  }
}

/** Distinct values in first-appearance order. */
export function distinct(values: number[]): number[] {
  const seen = new Set<number>();
  const out: number[] = [];
  for (const v of values) {
    if (!seen.has(v)) {
      seen.add(v);
      out.push(v);
    }
  }
  return out;
}
