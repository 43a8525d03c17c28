/** Parsing of ngteleport sweep CSV files.
 *
 * Contract: '#'-prefixed "key: value" metadata preamble, a fixed header
 * `r,T,F,lambda_min,p_ng,success,unsqueezed,region,flags,error`, one row per
 * grid point in r-major order, 12-significant-digit floats, lowercase
 * booleans. No quoting is used anywhere in the format.
 */

export interface SweepRow {
  r: number;
  T: number;
  F: number;
  lambdaMin: number;
  pNg: number;
  success: boolean;
  unsqueezed: boolean;
  region: boolean;
  flags: string[];
  error: string | null;
}

export interface SweepData {
  metadata: Record<string, string>;
  rows: SweepRow[];
}

export const REQUIRED_COLUMNS = [
  "r",
  "T",
  "F",
  "lambda_min",
  "p_ng",
  "success",
  "unsqueezed",
  "region",
  "flags",
  "error",
] as const;

function parseBool(text: string, line: number): boolean {
  if (text === "true") return true;
  if (text === "false") return false;
  throw new Error(`line ${line}: expected boolean, got '${text}'`);
}

export function parseSweepCsv(text: string): SweepData {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  const metadata: Record<string, string> = {};
  let headerIndex = -1;
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i];
    if (line.startsWith("#")) {
      const sep = line.indexOf(":");
      if (sep > 0) {
        metadata[line.slice(1, sep).trim()] = line.slice(sep + 1).trim();
      }
      continue;
    }
    headerIndex = i;
    break;
  }
  if (headerIndex < 0) throw new Error("no header line found");
  const header = lines[headerIndex].split(",");
  for (const col of REQUIRED_COLUMNS) {
    if (!header.includes(col)) throw new Error(`missing column '${col}'`);
  }
  const idx = (name: string) => header.indexOf(name);

  const rows: SweepRow[] = [];
  for (let i = headerIndex + 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== header.length) {
      throw new Error(`line ${i + 1}: expected ${header.length} fields, got ${parts.length}`);
    }
    const flags = parts[idx("flags")];
    const error = parts[idx("error")];
    rows.push({
      r: Number(parts[idx("r")]),
      T: Number(parts[idx("T")]),
      F: Number(parts[idx("F")]),
      lambdaMin: Number(parts[idx("lambda_min")]),
      pNg: Number(parts[idx("p_ng")]),
      success: parseBool(parts[idx("success")], i + 1),
      unsqueezed: parseBool(parts[idx("unsqueezed")], i + 1),
      region: parseBool(parts[idx("region")], i + 1),
      flags: flags.length ? flags.split(";") : [],
      error: error.length ? error : null,
    });
  }
  if (rows.length === 0) throw new Error("sweep file has no data rows");
  return { metadata, rows };
}

export interface SweepGrid {
  rValues: number[];
  tValues: number[];
  /** value(ri, ti) lookup tables, r-major */
  cell: (ri: number, ti: number) => SweepRow;
}

/** Arrange rows on their (r, T) grid; the file must cover it completely. */
export function toGrid(data: SweepData): SweepGrid {
  const rValues = [...new Set(data.rows.map((w) => w.r))].sort((a, b) => a - b);
  const tValues = [...new Set(data.rows.map((w) => w.T))].sort((a, b) => a - b);
  if (rValues.length * tValues.length !== data.rows.length) {
    throw new Error(
      `rows (${data.rows.length}) do not fill the ${rValues.length}x${tValues.length} grid`,
    );
  }
  const index = new Map<string, SweepRow>();
  for (const row of data.rows) index.set(`${row.r}|${row.T}`, row);
  return {
    rValues,
    tValues,
    cell: (ri, ti) => {
      const row = index.get(`${rValues[ri]}|${tValues[ti]}`);
      if (!row) throw new Error(`missing grid cell (${rValues[ri]}, ${tValues[ti]})`);
      return row;
    },
  };
}
