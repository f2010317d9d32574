/**
 * The linearized table format: " | " between a header and its value,
 * " <> " between rows.  These codecs mirror the toolkit's wire format so
 * callers can build inputs and unpack outputs without another process.
 */

export type GroupCell = { kind: "group"; text: string };
export type PairCell = { kind: "pair"; header: string; value: string };
export type Cell = GroupCell | PairCell;

export type ParseMode = "strict" | "lenient";

export class TableParseError extends Error {
  constructor(message: string, public readonly row?: number) {
    super(row === undefined ? message : `row ${row}: ${message}`);
    this.name = "TableParseError";
  }
}

/** Collapse whitespace, replace "|" with "/", delete every "<>". */
export function sanitizeText(raw: string): string {
  let s = raw.replace(/\|/g, "/");
  while (s.includes("<>")) {
    s = s.replaceAll("<>", "");
  }
  return s.split(/\s+/u).filter((t) => t.length > 0).join(" ");
}

export function linearize(cells: readonly Cell[]): string {
  if (cells.length === 0) {
    throw new TableParseError("empty table");
  }
  return cells
    .map((c) => (c.kind === "group" ? c.text : `${c.header} | ${c.value}`))
    .join(" <> ");
}

export function delinearize(s: string, mode: ParseMode = "strict"): Cell[] {
  const cells: Cell[] = [];
  const rows = s.split("<>");
  for (let i = 0; i < rows.length; i++) {
    let fields = rows[i].split("|").map(sanitizeText);
    if (mode === "strict") {
      if (fields.some((f) => f.length === 0)) {
        throw new TableParseError("empty field", i);
      }
      if (fields.length === 1) {
        cells.push({ kind: "group", text: fields[0] });
      } else if (fields.length === 2) {
        cells.push({ kind: "pair", header: fields[0], value: fields[1] });
      } else {
        throw new TableParseError(`${fields.length} fields`, i);
      }
    } else {
      fields = fields.filter((f) => f.length > 0);
      if (fields.length === 0) {
        continue;
      }
      if (fields.length === 1) {
        cells.push({ kind: "group", text: fields[0] });
      } else {
        cells.push({
          kind: "pair",
          header: fields[0],
          value: sanitizeText(fields.slice(1).join(" / ")),
        });
      }
    }
  }
  if (cells.length === 0) {
    throw new TableParseError("empty table");
  }
  return cells;
}
