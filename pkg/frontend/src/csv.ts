/**
 * Loader for the simulator's CSV contract.
 *
 * Every input file must start with the exact unit-convention line below;
 * anything else means the file was not produced for this renderer and is
 * rejected. Comment lines (#-prefixed) are kept verbatim, the first
 * non-comment line names the columns, and the rest are numeric rows.
 */

import { readFileSync } from "fs";

export const UNITS_LINE =
  "# units: rates in kappa, times in 1/kappa; convention x=(b+b_dag)/sqrt2";

export class ConventionError extends Error {}
export class CsvParseError extends Error {}

export interface Table {
  path: string;
  comments: string[];
  columns: Map<string, Float64Array>;
  rows: number;
}

export function loadTable(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new CsvParseError(`cannot read CSV ${path}: ${(err as Error).message}`);
  }
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0 || lines[0] !== UNITS_LINE) {
    throw new ConventionError(
      `${path}: first line must be the unit convention "${UNITS_LINE}"`,
    );
  }
  const comments: string[] = [];
  let i = 0;
  while (i < lines.length && lines[i].startsWith("#")) {
    comments.push(lines[i]);
    i += 1;
  }
  if (i >= lines.length) {
    throw new CsvParseError(`${path}: missing column header`);
  }
  const names = lines[i].split(",");
  i += 1;
  const rows = lines.length - i;
  const data = names.map(() => new Float64Array(rows));
  for (let r = 0; r < rows; r += 1) {
    const parts = lines[i + r].split(",");
    if (parts.length !== names.length) {
      throw new CsvParseError(
        `${path}: row ${r + 1} has ${parts.length} fields, expected ${names.length}`,
      );
    }
    for (let c = 0; c < names.length; c += 1) {
      const v = Number(parts[c]);
      if (Number.isNaN(v)) {
        throw new CsvParseError(
          `${path}: column "${names[c]}" row ${r + 1}: not a number (${parts[c]})`,
        );
      }
      data[c][r] = v;
    }
  }
  const columns = new Map(names.map((n, k) => [n, data[k]] as const));
  return { path, comments, columns, rows };
}

export function column(table: Table, name: string): Float64Array {
  const col = table.columns.get(name);
  if (col === undefined) {
    throw new CsvParseError(
      `${table.path}: missing column "${name}" (have: ${[...table.columns.keys()].join(", ")})`,
    );
  }
  return col;
}
