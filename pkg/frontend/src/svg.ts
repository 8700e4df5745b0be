/**
 * Minimal SVG chart rendering: markup strings from chart series, no
 * dependencies.  Scales are linear; the y-range is padded data extent
 * over everything drawn in the panel so tail and center views stay
 * comparable when the caller pins a shared range.
 */

import type { ChartSeries, Panel } from "./series.js";

export interface PlotArea {
  width: number;
  height: number;
  margin: { top: number; right: number; bottom: number; left: number };
}

export const DEFAULT_AREA: PlotArea = {
  width: 640,
  height: 300,
  margin: { top: 28, right: 16, bottom: 34, left: 48 },
};

export interface Extent {
  min: number;
  max: number;
}

function seriesExtentY(s: ChartSeries): Extent | null {
  if (s.kind === "marker") return null;
  const values = s.kind === "band" ? [...s.lower, ...s.upper] : s.y;
  if (values.length === 0) return null;
  let min = Infinity;
  let max = -Infinity;
  for (const v of values) {
    if (v < min) min = v;
    if (v > max) max = v;
  }
  return { min, max };
}

export function panelExtents(panel: Panel): { x: Extent; y: Extent } {
  let xMin = Infinity;
  let xMax = -Infinity;
  let yMin = Infinity;
  let yMax = -Infinity;
  for (const s of panel.series) {
    if (s.kind === "marker") {
      xMin = Math.min(xMin, s.x);
      xMax = Math.max(xMax, s.x);
      continue;
    }
    for (const v of s.x) {
      if (v < xMin) xMin = v;
      if (v > xMax) xMax = v;
    }
    const ey = seriesExtentY(s);
    if (ey) {
      yMin = Math.min(yMin, ey.min);
      yMax = Math.max(yMax, ey.max);
    }
  }
  if (!isFinite(xMin)) {
    xMin = 0;
    xMax = 1;
  }
  if (!isFinite(yMin)) {
    yMin = 0;
    yMax = 1;
  }
  if (yMin === yMax) {
    yMin -= 0.5;
    yMax += 0.5;
  }
  const pad = 0.06 * (yMax - yMin);
  return { x: { min: xMin, max: xMax }, y: { min: yMin - pad, max: yMax + pad } };
}

function ticks(extent: Extent, count: number): number[] {
  const span = extent.max - extent.min;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const candidates = [step, 2 * step, 5 * step, 10 * step];
  const chosen = candidates.find((c) => span / c <= count) ?? 10 * step;
  const out: number[] = [];
  let t = Math.ceil(extent.min / chosen) * chosen;
  while (t <= extent.max + 1e-12) {
    out.push(Number(t.toFixed(12)));
    t += chosen;
  }
  return out;
}

function fmt(v: number): string {
  return Number(v.toFixed(6)).toString();
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

/** Common y-extent across panels, so tail and center views of the same
 * bundle share a scale and band widths stay visually comparable. */
export function sharedYExtent(panels: Panel[]): Extent {
  let min = Infinity;
  let max = -Infinity;
  for (const panel of panels) {
    const ext = panelExtents(panel);
    min = Math.min(min, ext.y.min);
    max = Math.max(max, ext.y.max);
  }
  if (!isFinite(min)) {
    min = 0;
    max = 1;
  }
  return { min, max };
}

/** Render one panel (plus optional shared y-extent) as an SVG string. */
export function renderPanel(panel: Panel, area: PlotArea = DEFAULT_AREA, yExtent?: Extent): string {
  const ext = panelExtents(panel);
  const y = yExtent ?? ext.y;
  const x = ext.x;
  const { width, height, margin } = area;
  const iw = width - margin.left - margin.right;
  const ih = height - margin.top - margin.bottom;
  const sx = (v: number) => margin.left + ((v - x.min) / (x.max - x.min)) * iw;
  const sy = (v: number) => margin.top + ih - ((v - y.min) / (y.max - y.min)) * ih;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" class="panel">`,
  );
  parts.push(`<text x="${margin.left}" y="16" class="title">${esc(panel.title)}</text>`);

  for (const t of ticks(x, 6)) {
    const px = sx(t);
    parts.push(`<line x1="${fmt(px)}" y1="${margin.top}" x2="${fmt(px)}" y2="${margin.top + ih}" class="grid"/>`);
    parts.push(`<text x="${fmt(px)}" y="${height - 12}" class="tick" text-anchor="middle">${fmt(t)}</text>`);
  }
  for (const t of ticks(y, 5)) {
    const py = sy(t);
    parts.push(`<line x1="${margin.left}" y1="${fmt(py)}" x2="${margin.left + iw}" y2="${fmt(py)}" class="grid"/>`);
    parts.push(`<text x="${margin.left - 6}" y="${fmt(py + 3)}" class="tick" text-anchor="end">${fmt(t)}</text>`);
  }

  for (const s of panel.series) {
    if (s.kind === "band") {
      const fwd = s.x.map((v, i) => `${fmt(sx(v))},${fmt(sy(s.lower[i]))}`);
      const back = [...s.x].reverse().map((v, i) => {
        const ui = s.upper.length - 1 - i;
        return `${fmt(sx(v))},${fmt(sy(s.upper[ui]))}`;
      });
      parts.push(`<polygon points="${fwd.join(" ")} ${back.join(" ")}" fill="${s.color}" stroke="none"/>`);
    } else if (s.kind === "line") {
      const pts = s.x.map((v, i) => `${fmt(sx(v))},${fmt(sy(s.y[i]))}`).join(" ");
      const dash = s.dash ? ` stroke-dasharray="6 4"` : "";
      parts.push(`<polyline points="${pts}" fill="none" stroke="${s.color}" stroke-width="1.6"${dash}/>`);
    } else if (s.kind === "stem") {
      const zero = sy(Math.max(Math.min(0, y.max), y.min));
      for (let i = 0; i < s.x.length; i++) {
        const px = fmt(sx(s.x[i]));
        const py = fmt(sy(s.y[i]));
        const failed = s.flags && !s.flags[i];
        const color = failed ? "#f59e0b" : s.color;
        parts.push(`<line x1="${px}" y1="${fmt(zero)}" x2="${px}" y2="${py}" stroke="${color}" stroke-width="1.2"/>`);
        parts.push(`<circle cx="${px}" cy="${py}" r="2.2" fill="${color}"/>`);
      }
    } else {
      const px = fmt(sx(s.x));
      parts.push(
        `<line x1="${px}" y1="${margin.top}" x2="${px}" y2="${margin.top + ih}" stroke="${s.color}" stroke-width="1" stroke-dasharray="3 3"/>`,
      );
      parts.push(`<text x="${px}" y="${margin.top + 10}" class="tick" text-anchor="start"> ${esc(s.label)}</text>`);
    }
  }

  const legendItems = panel.series.filter((s) => s.kind === "line");
  legendItems.forEach((s, i) => {
    const lx = margin.left + iw - 150;
    const ly = margin.top + 14 + i * 16;
    const line = s as Extract<ChartSeries, { kind: "line" }>;
    const dash = line.dash ? ` stroke-dasharray="6 4"` : "";
    parts.push(`<line x1="${lx}" y1="${ly - 4}" x2="${lx + 22}" y2="${ly - 4}" stroke="${line.color}" stroke-width="2"${dash}/>`);
    parts.push(`<text x="${lx + 28}" y="${ly}" class="tick">${esc(s.label)}</text>`);
  });

  parts.push(`<text x="${width / 2}" y="${height - 1}" class="axis" text-anchor="middle">omega</text>`);
  parts.push(`<text x="12" y="${margin.top - 8}" class="axis">${esc(panel.yLabel)}</text>`);
  parts.push("</svg>");
  return parts.join("");
}
