/** Deterministic SVG scatter rendering.
 *
 * Points are emitted with their CSV decimal strings verbatim as data
 * coordinates inside a scaled group, so plotted coordinates round-trip
 * exactly; no mathematics is recomputed here.
 */

import { ZeroRow, readZeroCsv } from "./csv.js";
import { DEFAULT_PALETTE, PlotSpec } from "./spec.js";

export interface RenderResult {
  svg: string;
  warnings: string[];
}

interface LoadedSeries {
  label: string;
  color: string;
  rows: ZeroRow[];
}

const CANVAS = 640; // data viewport is square; legend strip sits below
const LEGEND_ROW = 22;
const MARGIN = 40;

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderScatter(spec: PlotSpec): RenderResult {
  const warnings: string[] = [];
  const series: LoadedSeries[] = spec.series.map((s, i) => {
    const rows = readZeroCsv(s.path);
    if (rows.length === 0) {
      warnings.push(`series '${s.path}' is empty`);
    }
    const n = rows.length > 0 ? rows[0].n : "?";
    const source = rows.length > 0 ? rows[0].source : s.path;
    return {
      label: s.label ?? `${source} (n=${n})`,
      color: s.color ?? DEFAULT_PALETTE[i % DEFAULT_PALETTE.length],
      rows,
    };
  });

  const [x0, x1, y0, y1] = spec.axis ?? [-2, 2, -2, 2];
  const span = Math.max(x1 - x0, y1 - y0); // equal aspect
  const scale = (CANVAS - 2 * MARGIN) / span;
  const height = CANVAS + LEGEND_ROW * series.length + MARGIN;
  // y axis flips: data (x, y) -> screen (tx + scale x, ty - scale y)
  const tx = MARGIN - scale * x0;
  const ty = MARGIN + scale * y1;
  const r = (0.008 * span).toPrecision(3);

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${CANVAS}" ` +
    `height="${height}" viewBox="0 0 ${CANVAS} ${height}">`);
  if (spec.title) {
    parts.push(`  <title>${esc(spec.title)}</title>`);
  }
  parts.push(`  <rect x="${MARGIN}" y="${MARGIN}" ` +
    `width="${CANVAS - 2 * MARGIN}" height="${CANVAS - 2 * MARGIN}" ` +
    `fill="none" stroke="#999" stroke-width="1"/>`);
  parts.push(`  <g transform="translate(${tx},${ty}) scale(${scale},-${scale})">`);
  for (const s of series) {
    parts.push(`    <g class="series" data-label="${esc(s.label)}" ` +
      `fill="${esc(s.color)}">`);
    for (const row of s.rows) {
      parts.push(`      <circle cx="${row.re}" cy="${row.im}" r="${r}"/>`);
    }
    parts.push(`    </g>`);
  }
  parts.push(`  </g>`);
  series.forEach((s, i) => {
    const y = CANVAS + LEGEND_ROW * (i + 1) - 6;
    parts.push(`  <rect x="${MARGIN}" y="${y - 10}" width="11" height="11" ` +
      `fill="${esc(s.color)}"/>`);
    parts.push(`  <text x="${MARGIN + 18}" y="${y}" font-family="sans-serif" ` +
      `font-size="13">${esc(s.label)} [${s.rows.length} points]</text>`);
  });
  parts.push(`</svg>`);
  return { svg: parts.join("\n") + "\n", warnings };
}
