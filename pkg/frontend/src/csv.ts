import { readFileSync } from "fs";
import Papa from "papaparse";
import { SchemaError } from "./errors.js";

/** Columns a figure can reference. The sweep CSVs carry more (mu, delta,
 * rates, bound, ...) but plotting never touches those. */
export const REQUIRED_COLUMNS = [
  "model",
  "n",
  "N",
  "nonlinearity",
  "T",
  "finalError",
  "status",
] as const;

export interface SweepRow {
  model: string;
  N: number;
  T: number;
  nonlinearity: number;
  finalError: number;
  status: string;
}

export function readSweepCsv(path: string): SweepRow[] {
  let raw: string;
  try {
    raw = readFileSync(path, "utf8");
  } catch (err) {
    throw new SchemaError(`cannot read csv ${path}: ${(err as Error).message}`);
  }
  const parsed = Papa.parse<Record<string, string>>(raw.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new SchemaError(`csv ${path} row ${first.row}: ${first.message}`);
  }
  const header = parsed.meta.fields ?? [];
  const missing = REQUIRED_COLUMNS.filter((c) => !header.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `csv ${path}: schema mismatch, missing column(s) ${missing.join(", ")}`
    );
  }
  if (parsed.data.length === 0) {
    throw new SchemaError(
      `csv ${path}: header only — schema requires at least one data row`
    );
  }
  return parsed.data.map((rec, i) => {
    const num = (col: string, requireFinite: boolean): number => {
      const v = Number(rec[col]);
      if (requireFinite && !Number.isFinite(v)) {
        throw new SchemaError(
          `csv ${path} row ${i + 2}: column ${col} is not a finite number (${rec[col]})`
        );
      }
      return v;
    };
    const status = rec.status ?? "";
    return {
      model: rec.model ?? "",
      N: num("N", true),
      T: num("T", true),
      nonlinearity: num("nonlinearity", true),
      // diverged rows carry the guard value and are never used as y data
      finalError: num("finalError", status !== "diverged"),
      status,
    };
  });
}
