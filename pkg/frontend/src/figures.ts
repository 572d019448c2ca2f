/**
 * The four figure kinds, each a pure function from parsed inputs to SVG
 * markup.  Every number plotted comes from the simulator's CSV/JSON; the
 * only computation here is the decay-rate fit used for slope annotations
 * (the same windowed least squares as the simulator's `fit` subcommand).
 */

import { column, parseCsv, requireColumns, SchemaMismatch, Table } from "./csv";
import { fitDecay } from "./fit";
import { Svg } from "./svg";

export const FIGURE_KINDS = [
  "radius_timeseries",
  "energy_decay",
  "spectrum_plane",
  "decay_fit_overlay",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

const KERNEL_TOL = 1e-8;

function extent(vals: number[], padFrac = 0.05): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of vals) {
    if (!Number.isFinite(v)) continue;
    lo = Math.min(lo, v);
    hi = Math.max(hi, v);
  }
  if (!(lo < hi)) {
    hi = lo + 1;
  }
  const pad = (hi - lo) * padFrac;
  return [lo - pad, hi + pad];
}

function logExtent(vals: number[]): [number, number] {
  const pos = vals.filter((v) => v > 0 && Number.isFinite(v));
  if (pos.length === 0) {
    throw new SchemaMismatch("no positive values for a log-scale figure");
  }
  return [Math.min(...pos) / 2, Math.max(...pos) * 2];
}

export function radiusTimeseries(table: Table): string {
  requireColumns(table, ["t", "R", "Rdot"]);
  const t = column(table, "t");
  const R = column(table, "R");
  const Rdot = column(table, "Rdot");
  const svg = new Svg();
  const sx = svg.xScale(...extent(t, 0));
  const sy = svg.yScale(...extent([...R, ...Rdot]));
  svg.axes(sx, sy, "t", "R, dR/dt");
  svg.polyline(t, R, sx, sy, "#1f77b4", "series-R");
  svg.polyline(t, Rdot, sx, sy, "#d62728", "series-Rdot");
  svg.title("bubble radius and wall velocity");
  svg.text(svg.innerRight - 8, svg.innerTop + 14, "R(t)", "legend", "end");
  svg.text(svg.innerRight - 8, svg.innerTop + 30, "dR/dt", "legend", "end");
  return svg.render();
}

export function energyDecay(table: Table): string {
  requireColumns(table, ["t", "E_total"]);
  const t = column(table, "t");
  const E = column(table, "E_total");
  // E decreases to its limit; the final sample stands in for E_*
  const eStar = E[E.length - 1];
  const q = E.map((e) => e - eStar);
  const keep: number[] = [];
  for (let i = 0; i < q.length; i++) {
    if (q[i] > 0) keep.push(i);
  }
  if (keep.length < 5) {
    throw new SchemaMismatch("energy series has no positive gap to plot");
  }
  const tk = keep.map((i) => t[i]);
  const qk = keep.map((i) => q[i]);
  const fit = fitDecay(tk, qk);
  const svg = new Svg();
  const sx = svg.xScale(...extent(tk, 0));
  const sy = svg.yScale(...logExtent(qk), true);
  svg.axes(sx, sy, "t", "E_total - E_*");
  svg.polyline(tk, qk, sx, sy, "#1f77b4", "series-energy");
  const tf = [fit.window[0], fit.window[1]];
  const qf = tf.map((x) => Math.exp(fit.intercept - fit.rate * x));
  svg.polyline(tf, qf, sx, sy, "#d62728", "fit-line");
  svg.title("energy relaxation");
  svg.text(svg.innerRight - 8, svg.innerTop + 14,
           `slope = -${fit.rate.toPrecision(6)}`, "slope-annotation", "end");
  return svg.render();
}

interface ComplexJson {
  re: number;
  im: number;
}

export interface SpectrumJson {
  eigenvalues: ComplexJson[];
  q_roots: ComplexJson[];
  beta: { beta: number };
}

export function parseSpectrum(text: string): SpectrumJson {
  let payload: unknown;
  try {
    payload = JSON.parse(text);
  } catch (err) {
    throw new SchemaMismatch(`not JSON: ${err}`);
  }
  const p = payload as Partial<SpectrumJson>;
  if (!Array.isArray(p.eigenvalues) || !Array.isArray(p.q_roots)
      || typeof p.beta?.beta !== "number") {
    throw new SchemaMismatch("spectrum JSON needs eigenvalues, q_roots, beta");
  }
  for (const z of [...p.eigenvalues, ...p.q_roots]) {
    if (typeof z?.re !== "number" || typeof z?.im !== "number") {
      throw new SchemaMismatch("spectrum entries must be {re, im}");
    }
  }
  return p as SpectrumJson;
}

export function spectrumPlane(spec: SpectrumJson): string {
  const svg = new Svg();
  const res = [...spec.eigenvalues, ...spec.q_roots].map((z) => z.re);
  const ims = [...spec.eigenvalues, ...spec.q_roots].map((z) => z.im);
  const sx = svg.xScale(...extent([...res, 0.5, -spec.beta.beta * 3]));
  const sy = svg.yScale(...extent([...ims, 1, -1]));
  svg.axes(sx, sy, "Re", "Im");
  svg.vline(-spec.beta.beta, sx, "#2ca02c", "beta-line");
  for (const z of spec.q_roots) {
    svg.marker(z.re, z.im, sx, sy, "#d62728", "marker-root", 4.5);
  }
  for (const z of spec.eigenvalues) {
    const cls = Math.hypot(z.re, z.im) <= KERNEL_TOL
      ? "marker-kernel"
      : "marker-eig";
    svg.marker(z.re, z.im, sx, sy, cls === "marker-kernel" ? "#9467bd" : "#1f77b4",
               cls, 3);
  }
  svg.title("linearized spectrum: eigenvalues, Q-roots, Re = -beta");
  return svg.render();
}

export function decayFitOverlay(table: Table): string {
  requireColumns(table, ["t", "dist_manifold"]);
  const t = column(table, "t");
  const d = column(table, "dist_manifold");
  const fit = fitDecay(t, d);
  const svg = new Svg();
  const sx = svg.xScale(...extent(t, 0));
  const sy = svg.yScale(...logExtent(d), true);
  svg.axes(sx, sy, "t", "dist to manifold");
  svg.polyline(t, d, sx, sy, "#1f77b4", "series-dist");
  const tf = [fit.window[0], fit.window[1]];
  const df = tf.map((x) => Math.exp(fit.intercept - fit.rate * x));
  svg.polyline(tf, df, sx, sy, "#d62728", "fit-line");
  svg.title("distance to the equilibrium manifold");
  svg.text(svg.innerRight - 8, svg.innerTop + 14,
           `rate = ${fit.rate.toPrecision(6)}`, "slope-annotation", "end");
  return svg.render();
}

export function renderFigure(kind: FigureKind, inputText: string): string {
  switch (kind) {
    case "radius_timeseries":
      return radiusTimeseries(parseCsv(inputText));
    case "energy_decay":
      return energyDecay(parseCsv(inputText));
    case "spectrum_plane":
      return spectrumPlane(parseSpectrum(inputText));
    case "decay_fit_overlay":
      return decayFitOverlay(parseCsv(inputText));
    default:
      throw new SchemaMismatch(`unknown figure kind ${kind}`);
  }
}
