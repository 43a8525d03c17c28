/** SVG rendering of sweep panels.
 *
 * Rendering is a pure function of the parsed CSV: no physics is recomputed
 * here, values and the region mask are visualised exactly as emitted by the
 * engine, so re-rendering the same file yields a byte-identical image.
 */

import { SweepData, SweepGrid, SweepRow, toGrid } from "./csv.js";
import { isoSegments } from "./contours.js";

export type Quantity = "F" | "lambda_min" | "region";

export interface PanelSpec {
  quantity: Quantity;
  title?: string;
  /** contour levels for value panels; the 0.5 level is always drawn black */
  levels?: number[];
}

export const DEFAULT_LEVELS: Record<Exclude<Quantity, "region">, number[]> = {
  F: [0.5, 0.6, 0.7, 0.8, 0.9],
  lambda_min: [0.25, 0.5, 0.75, 1.0],
};

export const PANEL_WIDTH = 300;
export const PANEL_HEIGHT = 260;
const MARGIN = { left: 46, right: 12, top: 26, bottom: 34 };
export const REGION_FILL = "#2a6f97";

function fmt(x: number): string {
  return Number(x.toFixed(3)).toString();
}

/** Piecewise-linear blue-to-yellow colour map on [0, 1]. */
export function colormap(t: number): string {
  const stops: Array<[number, [number, number, number]]> = [
    [0.0, [13, 8, 135]],
    [0.35, [126, 3, 168]],
    [0.65, [225, 100, 98]],
    [1.0, [240, 249, 33]],
  ];
  const u = Math.min(1, Math.max(0, t));
  for (let k = 0; k + 1 < stops.length; k++) {
    const [t0, c0] = stops[k];
    const [t1, c1] = stops[k + 1];
    if (u <= t1) {
      const s = (u - t0) / (t1 - t0);
      const mix = c0.map((c, i) => Math.round(c + s * (c1[i] - c)));
      return `rgb(${mix[0]},${mix[1]},${mix[2]})`;
    }
  }
  return "rgb(240,249,33)";
}

function quantityValue(row: SweepRow, quantity: Quantity): number {
  if (quantity === "F") return row.F;
  if (quantity === "lambda_min") return row.lambdaMin;
  return row.region ? 1 : 0;
}

interface Scales {
  x: (r: number) => number;
  y: (t: number) => number;
  cellW: number;
  cellH: number;
}

function makeScales(grid: SweepGrid): Scales {
  const innerW = PANEL_WIDTH - MARGIN.left - MARGIN.right;
  const innerH = PANEL_HEIGHT - MARGIN.top - MARGIN.bottom;
  const nr = grid.rValues.length;
  const nt = grid.tValues.length;
  const r0 = grid.rValues[0];
  const r1 = grid.rValues[nr - 1];
  const t0 = grid.tValues[0];
  const t1 = grid.tValues[nt - 1];
  const cellW = innerW / nr;
  const cellH = innerH / nt;
  return {
    x: (r) => MARGIN.left + ((r - r0) / (r1 - r0 || 1)) * (innerW - cellW) + cellW / 2,
    y: (t) => MARGIN.top + innerH - ((t - t0) / (t1 - t0 || 1)) * (innerH - cellH) - cellH / 2,
    cellW,
    cellH,
  };
}

function axes(grid: SweepGrid, scales: Scales, title: string): string {
  const parts: string[] = [];
  const innerH = PANEL_HEIGHT - MARGIN.bottom;
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${PANEL_WIDTH - MARGIN.left - MARGIN.right}" height="${innerH - MARGIN.top}" fill="none" stroke="#222" stroke-width="1"/>`,
  );
  parts.push(
    `<text x="${(MARGIN.left + PANEL_WIDTH - MARGIN.right) / 2}" y="${MARGIN.top - 9}" text-anchor="middle" font-size="12" font-family="sans-serif">${title}</text>`,
  );
  const rTicks = [grid.rValues[0], grid.rValues[Math.floor(grid.rValues.length / 2)], grid.rValues[grid.rValues.length - 1]];
  for (const r of rTicks) {
    const x = scales.x(r);
    parts.push(`<line x1="${fmt(x)}" y1="${innerH}" x2="${fmt(x)}" y2="${innerH + 4}" stroke="#222"/>`);
    parts.push(
      `<text x="${fmt(x)}" y="${innerH + 16}" text-anchor="middle" font-size="10" font-family="sans-serif">${fmt(r)}</text>`,
    );
  }
  const tTicks = [grid.tValues[0], grid.tValues[Math.floor(grid.tValues.length / 2)], grid.tValues[grid.tValues.length - 1]];
  for (const t of tTicks) {
    const y = scales.y(t);
    parts.push(`<line x1="${MARGIN.left - 4}" y1="${fmt(y)}" x2="${MARGIN.left}" y2="${fmt(y)}" stroke="#222"/>`);
    parts.push(
      `<text x="${MARGIN.left - 7}" y="${fmt(y + 3)}" text-anchor="end" font-size="10" font-family="sans-serif">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${(MARGIN.left + PANEL_WIDTH - MARGIN.right) / 2}" y="${PANEL_HEIGHT - 6}" text-anchor="middle" font-size="11" font-family="sans-serif">r</text>`,
  );
  parts.push(
    `<text x="12" y="${(MARGIN.top + innerH) / 2}" text-anchor="middle" font-size="11" font-family="sans-serif" transform="rotate(-90 12 ${(MARGIN.top + innerH) / 2})">T</text>`,
  );
  return parts.join("\n");
}

/** Render one panel as an SVG <g> fragment (no outer <svg> element). */
export function renderPanelBody(data: SweepData, spec: PanelSpec): string {
  const grid = toGrid(data);
  const scales = makeScales(grid);
  const parts: string[] = [];
  const title = spec.title ?? `${data.metadata["spec"] ?? ""} ${spec.quantity}`.trim();

  if (spec.quantity === "region") {
    for (let ri = 0; ri < grid.rValues.length; ri++) {
      for (let ti = 0; ti < grid.tValues.length; ti++) {
        const row = grid.cell(ri, ti);
        if (!row.region) continue;
        const x = scales.x(row.r) - scales.cellW / 2;
        const y = scales.y(row.T) - scales.cellH / 2;
        parts.push(
          `<rect class="region-on" x="${fmt(x)}" y="${fmt(y)}" width="${fmt(scales.cellW)}" height="${fmt(scales.cellH)}" fill="${REGION_FILL}"/>`,
        );
      }
    }
  } else {
    const values: number[][] = grid.rValues.map((_, ri) =>
      grid.tValues.map((_, ti) => quantityValue(grid.cell(ri, ti), spec.quantity)),
    );
    const finite = values.flat().filter((v) => Number.isFinite(v));
    const lo = Math.min(...finite);
    const hi = Math.max(...finite);
    const span = hi - lo || 1;
    for (let ri = 0; ri < grid.rValues.length; ri++) {
      for (let ti = 0; ti < grid.tValues.length; ti++) {
        const v = values[ri][ti];
        if (!Number.isFinite(v)) continue;
        const x = scales.x(grid.rValues[ri]) - scales.cellW / 2;
        const y = scales.y(grid.tValues[ti]) - scales.cellH / 2;
        parts.push(
          `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(scales.cellW)}" height="${fmt(scales.cellH)}" fill="${colormap((v - lo) / span)}"/>`,
        );
      }
    }
    const xs = grid.rValues.map(scales.x);
    const ys = grid.tValues.map(scales.y);
    const levels = spec.levels ?? DEFAULT_LEVELS[spec.quantity];
    for (const level of levels) {
      const segs = isoSegments(xs, ys, (i, j) => values[i][j], level);
      if (!segs.length) continue;
      const path = segs
        .map((s) => `M${fmt(s.x1)} ${fmt(s.y1)}L${fmt(s.x2)} ${fmt(s.y2)}`)
        .join("");
      const isBoundary = Math.abs(level - 0.5) < 1e-12;
      const stroke = isBoundary ? "#000000" : "#666666";
      const width = isBoundary ? 1.6 : 0.9;
      const cls = isBoundary ? ` class="boundary-half"` : "";
      parts.push(`<path${cls} d="${path}" fill="none" stroke="${stroke}" stroke-width="${width}"/>`);
    }
  }
  parts.push(axes(grid, scales, title));
  return parts.join("\n");
}

function svgDocument(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">\n` +
    `<rect width="${width}" height="${height}" fill="#ffffff"/>\n` +
    body +
    "\n</svg>\n"
  );
}

export function renderPanel(data: SweepData, spec: PanelSpec): string {
  return svgDocument(PANEL_WIDTH, PANEL_HEIGHT, renderPanelBody(data, spec));
}

export interface GridPanel {
  data: SweepData;
  spec: PanelSpec;
}

/** 3x3 composite: one column per input file, rows F / lambda_min / region. */
export function renderGrid(panels: GridPanel[]): string {
  if (panels.length !== 9) {
    throw new Error(`expected exactly 9 panels, got ${panels.length}`);
  }
  const parts: string[] = [];
  for (let k = 0; k < 9; k++) {
    const col = k % 3;
    const rowIdx = Math.floor(k / 3);
    const dx = col * PANEL_WIDTH;
    const dy = rowIdx * PANEL_HEIGHT;
    parts.push(
      `<g class="panel" transform="translate(${dx},${dy})">\n` +
        renderPanelBody(panels[k].data, panels[k].spec) +
        "\n</g>",
    );
  }
  return svgDocument(3 * PANEL_WIDTH, 3 * PANEL_HEIGHT, parts.join("\n"));
}

/** Count rows flagged region=true (for cross-checking shaded cells). */
export function regionCount(data: SweepData): number {
  return data.rows.filter((w) => w.region).length;
}
