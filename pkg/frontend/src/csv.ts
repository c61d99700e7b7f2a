/** Zero-set CSV contract: header `re,im,source,n`, decimal-string cells. */

import { readFileSync } from "node:fs";

export interface ZeroRow {
  /** decimal strings, kept verbatim for lossless round-tripping */
  re: string;
  im: string;
  source: string;
  n: string;
}

export class SchemaError extends Error {
  constructor(path: string, line: number, detail: string) {
    super(`${path}:${line}: ${detail}`);
  }
}

const HEADER = ["re", "im", "source", "n"];
const NUMBER = /^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$/;

export function parseZeroCsv(path: string, text: string): ZeroRow[] {
  const lines = text.split(/\r\n|\n/);
  if (lines.length === 0 || lines[0].trim() === "") {
    throw new SchemaError(path, 1, "missing header");
  }
  const header = lines[0].split(",").map((s) => s.trim());
  if (HEADER.some((h, i) => header[i] !== h)) {
    throw new SchemaError(path, 1, `expected header ${HEADER.join(",")}`);
  }
  const rows: ZeroRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i];
    if (line.trim() === "") continue;
    const cells = line.split(",");
    if (cells.length !== 4) {
      throw new SchemaError(path, i + 1, `expected 4 cells, got ${cells.length}`);
    }
    const [re, im, source, n] = cells.map((s) => s.trim());
    if (!NUMBER.test(re) || !NUMBER.test(im)) {
      throw new SchemaError(path, i + 1, `non-numeric coordinates '${re}','${im}'`);
    }
    rows.push({ re, im, source, n });
  }
  return rows;
}

export function readZeroCsv(path: string): ZeroRow[] {
  return parseZeroCsv(path, readFileSync(path, "utf-8"));
}
