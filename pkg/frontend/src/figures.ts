/**
 * Figure builders: sweep and collapse CSVs in, plot spec + data series out.
 *
 * Every builder is a pure function of its input files and options. The
 * `series` payload is exactly what gets drawn (after axis transforms are
 * applied by the renderer, not here), and is what golden tests compare.
 * No physics is recomputed here; fitted exponents arrive as inputs.
 */

import { DataFile, distinct, requireKind } from "./csv.js";
import { Curve, PlotSpec, renderSvg } from "./svg.js";

export interface SeriesCurve {
  label: string;
  highlight?: boolean;
  guide?: boolean;
  points: [number, number][];
}

export interface FigureSeries {
  figure: string;
  meta: Record<string, string | number>;
  curves: SeriesCurve[];
}

export interface Figure {
  name: string;
  svg: string;
  series: FigureSeries;
}

function toCurve(c: SeriesCurve, extra: Partial<Curve> = {}): Curve {
  return {
    label: c.label,
    highlight: c.highlight,
    points: c.points.map(([x, y]) => ({ x, y })),
    ...extra,
  };
}

function fmt(v: number): string {
  return String(Number(v.toPrecision(10)));
}

function rows(file: DataFile, names: string[]): number[][] {
  const cols = names.map((n) => {
    const c = file.columns[n];
    if (!c) throw new Error(`missing column ${n}`);
    return c;
  });
  return cols[0].map((_, i) => cols.map((c) => c[i]));
}

/** Entropy vs system size per measurement rate, log-log; the curve nearest
 * the supplied critical rate is drawn thick (the highlighted-p_c convention). */
export function sweepLogLog(file: DataFile, pc: number | null, tag = ""): Figure {
  requireKind(file, "sweep");
  const model = file.meta["model"] ?? "";
  const data = rows(file, ["L", "p", "S_mean"]);
  const ps = distinct(data.map((r) => r[1])).sort((a, b) => a - b);
  let highlightP: number | null = null;
  if (pc !== null) {
    highlightP = ps.reduce((best, p) => (Math.abs(p - pc) < Math.abs(best - pc) ? p : best), ps[0]);
  }
  const curves: SeriesCurve[] = ps.map((p) => ({
    label: `p=${fmt(p)}`,
    highlight: highlightP !== null && p === highlightP,
    points: data
      .filter((r) => r[1] === p)
      .sort((a, b) => a[0] - b[0])
      .map((r) => [r[0], r[2]] as [number, number]),
  }));
  const name = `sweep_loglog_${model}${tag}`;
  const series: FigureSeries = {
    figure: "sweep-loglog",
    meta: { model, highlighted_p: highlightP === null ? "" : highlightP },
    curves,
  };
  const spec: PlotSpec = {
    title: `Steady entanglement vs size (model ${model})`,
    xLabel: "L",
    yLabel: "S(L/4) [bits]",
    xScale: "log",
    yScale: "log",
    curves: curves.map((c) => toCurve(c)),
  };
  return { name, svg: renderSvg(spec), series };
}

/** Entropy vs measurement rate per system size, semi-log. */
export function sweepSemiLog(file: DataFile, tag = ""): Figure {
  requireKind(file, "sweep");
  const model = file.meta["model"] ?? "";
  const data = rows(file, ["L", "p", "S_mean"]);
  const Ls = distinct(data.map((r) => r[0])).sort((a, b) => a - b);
  const curves: SeriesCurve[] = Ls.map((L) => ({
    label: `L=${fmt(L)}`,
    points: data
      .filter((r) => r[0] === L)
      .sort((a, b) => a[1] - b[1])
      .map((r) => [r[1], r[2]] as [number, number]),
  }));
  const name = `sweep_semilog_${model}${tag}`;
  const series: FigureSeries = { figure: "sweep-semilog", meta: { model }, curves };
  const spec: PlotSpec = {
    title: `Steady entanglement vs measurement rate (model ${model})`,
    xLabel: "p",
    yLabel: "S(L/4) [bits]",
    xScale: "linear",
    yScale: "log",
    curves: curves.map((c) => toCurve(c)),
  };
  return { name, svg: renderSvg(spec), series };
}

function movingAverage(points: [number, number][], window: number): [number, number][] {
  const out: [number, number][] = [];
  for (let i = 0; i < points.length; i++) {
    const lo = Math.max(0, i - Math.floor(window / 2));
    const hi = Math.min(points.length, lo + window);
    let sx = 0;
    let sy = 0;
    for (let j = lo; j < hi; j++) {
      sx += points[j][0];
      sy += points[j][1];
    }
    out.push([sx / (hi - lo), sy / (hi - lo)]);
  }
  return out;
}

/** Static collapse: S/L^gamma vs (p-p_c)L^(1/nu) per size, with a smoothed
 * pooled master curve overlay. Reads the collapsed CSV; exponents live in
 * its metadata. */
export function collapseStatic(file: DataFile, tag = ""): Figure {
  requireKind(file, "collapsed");
  const model = file.meta["model"] ?? "";
  const data = rows(file, ["L", "p", "x", "y"]);
  const Ls = distinct(data.map((r) => r[0])).sort((a, b) => a - b);
  const curves: SeriesCurve[] = Ls.map((L) => ({
    label: `L=${fmt(L)}`,
    points: data
      .filter((r) => r[0] === L)
      .sort((a, b) => a[2] - b[2])
      .map((r) => [r[2], r[3]] as [number, number]),
  }));
  const pooled = data.map((r) => [r[2], r[3]] as [number, number]).sort((a, b) => a[0] - b[0]);
  curves.push({ label: "master curve", guide: true, points: movingAverage(pooled, 5) });
  const name = `collapse_${model}${tag}`;
  const series: FigureSeries = {
    figure: "collapse-static",
    meta: {
      model,
      p_c: Number(file.meta["p_c"]),
      nu: Number(file.meta["nu"]),
      gamma: Number(file.meta["gamma"]),
    },
    curves,
  };
  const spec: PlotSpec = {
    title:
      `Static collapse (model ${model}): p_c=${fmt(Number(file.meta["p_c"]))}, ` +
      `nu=${fmt(Number(file.meta["nu"]))}, gamma=${fmt(Number(file.meta["gamma"]))}`,
    xLabel: "(p - p_c) L^(1/nu)",
    yLabel: "S / L^gamma",
    xScale: "linear",
    yScale: "log",
    curves: curves.map((c) => toCurve(c, c.guide ? { dashed: true, noMarkers: true } : {})),
  };
  return { name, svg: renderSvg(spec), series };
}

/** Dynamic collapse: S L^-gamma vs t L^-z from per-size time-series CSVs,
 * with the small-x power-law guide y ~ x^(gamma/z). */
export function collapseDynamic(files: DataFile[], gamma: number, z: number, tag = ""): Figure {
  if (files.length < 2) throw new Error("dynamic collapse needs series for at least 2 sizes");
  const curves: SeriesCurve[] = [];
  const pooled: [number, number][] = [];
  for (const f of [...files].sort((a, b) => Number(a.meta["L"]) - Number(b.meta["L"]))) {
    requireKind(f, "ensemble_series");
    const L = Number(f.meta["L"]);
    const pts: [number, number][] = [];
    for (const [t, s] of rows(f, ["t", "mean_S"])) {
      if (t <= 0) continue;
      const x = t * Math.pow(L, -z);
      const y = s * Math.pow(L, -gamma);
      pts.push([x, y]);
      pooled.push([x, y]);
    }
    curves.push({ label: `L=${fmt(L)}`, points: pts });
  }
  // guide y = C x^(gamma/z), anchored on the smallest-x quartile
  pooled.sort((a, b) => a[0] - b[0]);
  const q = pooled.slice(0, Math.max(2, Math.floor(pooled.length / 4))).filter(([, y]) => y > 0);
  const exps = q.map(([x, y]) => y / Math.pow(x, gamma / z)).sort((a, b) => a - b);
  const C = exps[Math.floor(exps.length / 2)];
  const xMin = pooled[0][0];
  const xMax = Math.min(0.5, pooled[pooled.length - 1][0]);
  const guide: [number, number][] = [];
  for (let i = 0; i <= 40; i++) {
    const x = xMin * Math.pow(xMax / xMin, i / 40);
    guide.push([x, C * Math.pow(x, gamma / z)]);
  }
  curves.push({ label: `x^(gamma/z) guide`, guide: true, points: guide });
  const name = `dynamic_collapse${tag}`;
  const series: FigureSeries = {
    figure: "collapse-dynamic",
    meta: { gamma, z, guide_amplitude: C },
    curves,
  };
  const spec: PlotSpec = {
    title: `Dynamic collapse at criticality: gamma=${fmt(gamma)}, z=${fmt(z)}`,
    xLabel: "t L^-z",
    yLabel: "S L^-gamma",
    xScale: "log",
    yScale: "log",
    curves: curves.map((c) => toCurve(c, c.guide ? { dashed: true, noMarkers: true } : {})),
  };
  return { name, svg: renderSvg(spec), series };
}

export function serializeSeries(series: FigureSeries): string {
  return JSON.stringify(series, null, 2) + "\n";
}
