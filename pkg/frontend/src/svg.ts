/**
 * Minimal SVG scatter/line plotting: linear and log10 axes, per-curve
 * markers, dashed guide lines, a legend, and nothing interactive.
 */

export type Scale = "linear" | "log";

export interface Point {
  x: number;
  y: number;
}

export interface Curve {
  label: string;
  points: Point[];
  highlight?: boolean;
  dashed?: boolean;
  noMarkers?: boolean;
}

export interface PlotSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  xScale: Scale;
  yScale: Scale;
  curves: Curve[];
  width?: number;
  height?: number;
}

const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
  "#e377c2", "#17becf", "#bcbd22", "#7f7f7f", "#aec7e8", "#ff9896",
];

const MARGIN = { left: 64, right: 150, top: 36, bottom: 48 };

function fwd(scale: Scale, v: number): number {
  return scale === "log" ? Math.log10(v) : v;
}

function plottable(scale: Scale, p: Point): boolean {
  if (!Number.isFinite(p.x) || !Number.isFinite(p.y)) return false;
  return true;
}

function usable(spec: PlotSpec, p: Point): boolean {
  if (!plottable(spec.xScale, p)) return false;
  if (spec.xScale === "log" && p.x <= 0) return false;
  if (spec.yScale === "log" && p.y <= 0) return false;
  return true;
}

function niceTicks(lo: number, hi: number, scale: Scale): number[] {
  if (scale === "log") {
    const ticks: number[] = [];
    for (let e = Math.floor(lo); e <= Math.ceil(hi); e++) ticks.push(e);
    return ticks.filter((t) => t >= lo - 1e-9 && t <= hi + 1e-9);
  }
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / 4)));
  const mult = span / step > 8 ? 2 : 1;
  const s = step * mult;
  const start = Math.ceil(lo / s) * s;
  const ticks: number[] = [];
  for (let v = start; v <= hi + 1e-9; v += s) ticks.push(Number(v.toPrecision(12)));
  return ticks;
}

function fmtTick(v: number, scale: Scale): string {
  if (scale === "log") {
    const val = Math.pow(10, v);
    if (val >= 0.01 && val < 10000) return String(Number(val.toPrecision(6)));
    return `1e${v}`;
  }
  return String(Number(v.toPrecision(6)));
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderSvg(spec: PlotSpec): string {
  const width = spec.width ?? 760;
  const height = spec.height ?? 520;
  const innerW = width - MARGIN.left - MARGIN.right;
  const innerH = height - MARGIN.top - MARGIN.bottom;

  const pts = spec.curves.flatMap((c) => c.points.filter((p) => usable(spec, p)));
  if (pts.length === 0) throw new Error(`no plottable points for ${spec.title}`);
  const xs = pts.map((p) => fwd(spec.xScale, p.x));
  const ys = pts.map((p) => fwd(spec.yScale, p.y));
  let xLo = Math.min(...xs);
  let xHi = Math.max(...xs);
  let yLo = Math.min(...ys);
  let yHi = Math.max(...ys);
  const padX = (xHi - xLo || 1) * 0.05;
  const padY = (yHi - yLo || 1) * 0.08;
  xLo -= padX; xHi += padX; yLo -= padY; yHi += padY;

  const X = (v: number) => MARGIN.left + ((fwd(spec.xScale, v) - xLo) / (xHi - xLo)) * innerW;
  const Y = (v: number) => MARGIN.top + innerH - ((fwd(spec.yScale, v) - yLo) / (yHi - yLo)) * innerH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(`<text x="${MARGIN.left}" y="22" font-size="15" font-weight="bold">${esc(spec.title)}</text>`);

  // axes + ticks + grid
  const axisY = MARGIN.top + innerH;
  parts.push(`<g stroke="#333" stroke-width="1">`);
  parts.push(`<line x1="${MARGIN.left}" y1="${axisY}" x2="${MARGIN.left + innerW}" y2="${axisY}"/>`);
  parts.push(`<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${axisY}"/>`);
  parts.push(`</g>`);
  for (const t of niceTicks(xLo, xHi, spec.xScale)) {
    const px = MARGIN.left + ((t - xLo) / (xHi - xLo)) * innerW;
    parts.push(`<line x1="${px.toFixed(2)}" y1="${MARGIN.top}" x2="${px.toFixed(2)}" y2="${axisY}" stroke="#ddd"/>`);
    parts.push(
      `<text x="${px.toFixed(2)}" y="${axisY + 18}" font-size="11" text-anchor="middle">${fmtTick(t, spec.xScale)}</text>`
    );
  }
  for (const t of niceTicks(yLo, yHi, spec.yScale)) {
    const py = MARGIN.top + innerH - ((t - yLo) / (yHi - yLo)) * innerH;
    parts.push(`<line x1="${MARGIN.left}" y1="${py.toFixed(2)}" x2="${MARGIN.left + innerW}" y2="${py.toFixed(2)}" stroke="#ddd"/>`);
    parts.push(
      `<text x="${MARGIN.left - 6}" y="${(py + 4).toFixed(2)}" font-size="11" text-anchor="end">${fmtTick(t, spec.yScale)}</text>`
    );
  }
  parts.push(
    `<text x="${MARGIN.left + innerW / 2}" y="${height - 10}" font-size="13" text-anchor="middle">${esc(spec.xLabel)}</text>`
  );
  parts.push(
    `<text x="16" y="${MARGIN.top + innerH / 2}" font-size="13" text-anchor="middle" ` +
      `transform="rotate(-90 16 ${MARGIN.top + innerH / 2})">${esc(spec.yLabel)}</text>`
  );

  // curves
  spec.curves.forEach((curve, ci) => {
    const color = curve.dashed ? "#444" : PALETTE[ci % PALETTE.length];
    const pts = curve.points.filter((p) => usable(spec, p));
    if (pts.length === 0) return;
    const path = pts.map((p, i) => `${i ? "L" : "M"}${X(p.x).toFixed(2)} ${Y(p.y).toFixed(2)}`).join(" ");
    const sw = curve.highlight ? 3.5 : 1.6;
    const dash = curve.dashed ? ` stroke-dasharray="7 5"` : "";
    parts.push(`<path d="${path}" fill="none" stroke="${color}" stroke-width="${sw}"${dash}/>`);
    if (!curve.noMarkers) {
      for (const p of pts) {
        parts.push(`<circle cx="${X(p.x).toFixed(2)}" cy="${Y(p.y).toFixed(2)}" r="2.6" fill="${color}"/>`);
      }
    }
  });

  // legend
  let ly = MARGIN.top + 6;
  const lx = MARGIN.left + innerW + 12;
  for (const [ci, curve] of spec.curves.entries()) {
    const color = curve.dashed ? "#444" : PALETTE[ci % PALETTE.length];
    const sw = curve.highlight ? 3.5 : 1.8;
    const dash = curve.dashed ? ` stroke-dasharray="7 5"` : "";
    parts.push(`<line x1="${lx}" y1="${ly}" x2="${lx + 26}" y2="${ly}" stroke="${color}" stroke-width="${sw}"${dash}/>`);
    parts.push(`<text x="${lx + 32}" y="${ly + 4}" font-size="12">${esc(curve.label)}</text>`);
    ly += 18;
  }
  parts.push("</svg>");
  return parts.join("\n");
}
