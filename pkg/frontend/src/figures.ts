/**
 * Figure definitions and renderers.
 *
 * Three panel kinds cover the whole set: multi-series line plots,
 * a parametric phase-space plot, and heatmaps on a long-format grid.
 * A renderer maps data to pixels and nothing else; every array it plots is
 * returned verbatim in `plotted` so tests can checksum them against the CSV
 * contents and prove no physics was recomputed.
 */

import { column, loadTable, Table } from "./csv.js";
import { encodePng } from "./png.js";
import {
  BLACK,
  Color,
  divergingColor,
  GREY,
  Raster,
  sequentialColor,
  SERIES_COLORS,
  WHITE,
} from "./raster.js";

export interface LineSpec {
  kind: "lines";
  name: string;
  csv: string;
  x: string;
  y: string;
  groupBy?: string;
  xLabel: string;
  yLabel: string;
  extraYs?: string[]; // additional columns drawn as separate series
}

export interface ParametricSpec {
  kind: "parametric";
  name: string;
  csv: string;
  x: string;
  y: string;
  xLabel: string;
  yLabel: string;
}

export interface HeatmapSpec {
  kind: "heatmap";
  name: string;
  csv: string;
  x: string;
  y: string;
  v: string;
  scale: "sequential" | "diverging";
  xLabel: string;
  yLabel: string;
}

export type FigureSpec = LineSpec | ParametricSpec | HeatmapSpec;

export interface Rendered {
  name: string;
  png: Buffer;
  plotted: Record<string, number[]>;
}

const W = 640;
const H = 480;
const MARGIN = { left: 70, right: 90, top: 24, bottom: 52 };

function niceTicks(lo: number, hi: number, n = 5): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step0 = span / (n - 1);
  const mag = 10 ** Math.floor(Math.log10(step0));
  const candidates = [1, 2, 2.5, 5, 10].map((m) => m * mag);
  const step = candidates.find((c) => span / c <= n) ?? candidates[4];
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + 1e-12 * span; v += step) {
    ticks.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return ticks;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1).replace("e", "e");
  return Number(v.toPrecision(4)).toString();
}

class Axes {
  constructor(
    readonly r: Raster,
    readonly xLo: number,
    readonly xHi: number,
    readonly yLo: number,
    readonly yHi: number,
  ) {}

  px(x: number): number {
    const w = W - MARGIN.left - MARGIN.right;
    return MARGIN.left + ((x - this.xLo) / (this.xHi - this.xLo || 1)) * w;
  }

  py(y: number): number {
    const h = H - MARGIN.top - MARGIN.bottom;
    return H - MARGIN.bottom - ((y - this.yLo) / (this.yHi - this.yLo || 1)) * h;
  }

  frame(xLabel: string, yLabel: string): void {
    const r = this.r;
    r.line(MARGIN.left, MARGIN.top, MARGIN.left, H - MARGIN.bottom, BLACK);
    r.line(MARGIN.left, H - MARGIN.bottom, W - MARGIN.right, H - MARGIN.bottom, BLACK);
    r.line(W - MARGIN.right, MARGIN.top, W - MARGIN.right, H - MARGIN.bottom, GREY);
    r.line(MARGIN.left, MARGIN.top, W - MARGIN.right, MARGIN.top, GREY);
    for (const t of niceTicks(this.xLo, this.xHi)) {
      const x = this.px(t);
      r.line(x, H - MARGIN.bottom, x, H - MARGIN.bottom + 4, BLACK);
      const label = fmt(t);
      r.text(x - r.textWidth(label) / 2, H - MARGIN.bottom + 8, label);
    }
    for (const t of niceTicks(this.yLo, this.yHi)) {
      const y = this.py(t);
      r.line(MARGIN.left - 4, y, MARGIN.left, y, BLACK);
      const label = fmt(t);
      r.text(MARGIN.left - 8 - r.textWidth(label), y - 3, label);
    }
    r.text(
      MARGIN.left + (W - MARGIN.left - MARGIN.right) / 2 - r.textWidth(xLabel) / 2,
      H - 16,
      xLabel,
    );
    r.textUp(6, MARGIN.top + (H - MARGIN.top - MARGIN.bottom) / 2 + r.textWidth(yLabel) / 2, yLabel);
  }
}

function finiteRange(values: Iterable<number>): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!(hi >= lo)) throw new Error("empty data range");
  if (hi === lo) {
    hi += 1;
    lo -= 1;
  }
  return [lo, hi];
}

function drawSeries(ax: Axes, xs: ArrayLike<number>, ys: ArrayLike<number>, color: Color): void {
  for (let i = 1; i < xs.length; i += 1) {
    ax.r.line(ax.px(xs[i - 1]), ax.py(ys[i - 1]), ax.px(xs[i]), ax.py(ys[i]), color, 2);
  }
}

function legend(r: Raster, entries: [string, Color][]): void {
  let y = MARGIN.top + 8;
  for (const [label, color] of entries) {
    r.fillRect(W - MARGIN.right + 8, y, 14, 3, color);
    r.text(W - MARGIN.right + 26, y - 2, label.slice(0, 9));
    y += 14;
  }
}

function renderLines(spec: LineSpec, table: Table): Rendered {
  const xs = column(table, spec.x);
  const plotted: Record<string, number[]> = { [spec.x]: Array.from(xs) };
  const seriesList: { label: string; xs: number[]; ys: number[] }[] = [];
  if (spec.groupBy) {
    const groups = column(table, spec.groupBy);
    const ys = column(table, spec.y);
    plotted[spec.y] = Array.from(ys);
    plotted[spec.groupBy] = Array.from(groups);
    const seen: number[] = [];
    for (const g of groups) if (!seen.includes(g)) seen.push(g);
    for (const g of seen) {
      const sx: number[] = [];
      const sy: number[] = [];
      for (let i = 0; i < xs.length; i += 1) {
        if (groups[i] === g) {
          sx.push(xs[i]);
          sy.push(ys[i]);
        }
      }
      seriesList.push({ label: `${spec.groupBy}=${fmt(g)}`, xs: sx, ys: sy });
    }
  } else {
    for (const name of [spec.y, ...(spec.extraYs ?? [])]) {
      const ys = column(table, name);
      plotted[name] = Array.from(ys);
      seriesList.push({ label: name, xs: Array.from(xs), ys: Array.from(ys) });
    }
  }
  const r = new Raster(W, H);
  const [xLo, xHi] = finiteRange(xs);
  const [yLo, yHi] = finiteRange(seriesList.flatMap((s) => s.ys));
  const pad = 0.05 * (yHi - yLo);
  const ax = new Axes(r, xLo, xHi, yLo - pad, yHi + pad);
  if (yLo - pad < 0 && yHi + pad > 0) {
    r.line(ax.px(xLo), ax.py(0), ax.px(xHi), ax.py(0), GREY);
  }
  seriesList.forEach((s, i) => drawSeries(ax, s.xs, s.ys, SERIES_COLORS[i % SERIES_COLORS.length]));
  ax.frame(spec.xLabel, spec.yLabel);
  legend(r, seriesList.map((s, i) => [s.label, SERIES_COLORS[i % SERIES_COLORS.length]]));
  return { name: spec.name, png: encodePng(W, H, r.data), plotted };
}

function renderParametric(spec: ParametricSpec, table: Table): Rendered {
  const xs = column(table, spec.x);
  const ys = column(table, spec.y);
  const plotted = { [spec.x]: Array.from(xs), [spec.y]: Array.from(ys) };
  const r = new Raster(W, H);
  const [xLo0, xHi0] = finiteRange(xs);
  const [yLo0, yHi0] = finiteRange(ys);
  const padX = 0.08 * (xHi0 - xLo0);
  const padY = 0.08 * (yHi0 - yLo0);
  const ax = new Axes(r, xLo0 - padX, xHi0 + padX, yLo0 - padY, yHi0 + padY);
  drawSeries(ax, xs, ys, SERIES_COLORS[0]);
  // mark the start of the trajectory
  r.fillRect(ax.px(xs[0]) - 3, ax.py(ys[0]) - 3, 7, 7, SERIES_COLORS[1]);
  ax.frame(spec.xLabel, spec.yLabel);
  return { name: spec.name, png: encodePng(W, H, r.data), plotted };
}

function uniqueSorted(values: ArrayLike<number>): number[] {
  return [...new Set(Array.from(values))].sort((a, b) => a - b);
}

function renderHeatmap(spec: HeatmapSpec, table: Table): Rendered {
  const xs = column(table, spec.x);
  const ys = column(table, spec.y);
  const vs = column(table, spec.v);
  const plotted = {
    [spec.x]: Array.from(xs),
    [spec.y]: Array.from(ys),
    [spec.v]: Array.from(vs),
  };
  const xAxis = uniqueSorted(xs);
  const yAxis = uniqueSorted(ys);
  if (xAxis.length * yAxis.length !== vs.length) {
    throw new Error(
      `${table.path}: long-format grid is ragged (${xAxis.length} x ${yAxis.length} != ${vs.length})`,
    );
  }
  const xIndex = new Map(xAxis.map((v, i) => [v, i] as const));
  const yIndex = new Map(yAxis.map((v, i) => [v, i] as const));
  const grid = new Float64Array(xAxis.length * yAxis.length);
  for (let i = 0; i < vs.length; i += 1) {
    grid[yIndex.get(ys[i])! * xAxis.length + xIndex.get(xs[i])!] = vs[i];
  }
  const r = new Raster(W, H);
  const [vLo, vHi] = finiteRange(vs);
  const amp = Math.max(Math.abs(vLo), Math.abs(vHi));
  const colorOf = (v: number): Color =>
    spec.scale === "diverging" ? divergingColor(v, amp) : sequentialColor(v, Math.min(vLo, 0), vHi);

  const plotW = W - MARGIN.left - MARGIN.right;
  const plotH = H - MARGIN.top - MARGIN.bottom;
  const cellW = plotW / xAxis.length;
  const cellH = plotH / yAxis.length;
  for (let iy = 0; iy < yAxis.length; iy += 1) {
    for (let ix = 0; ix < xAxis.length; ix += 1) {
      const v = grid[iy * xAxis.length + ix];
      // y axis increases upward
      r.fillRect(
        MARGIN.left + ix * cellW,
        H - MARGIN.bottom - (iy + 1) * cellH,
        cellW + 1,
        cellH + 1,
        colorOf(v),
      );
    }
  }
  const ax = new Axes(r, xAxis[0], xAxis[xAxis.length - 1], yAxis[0], yAxis[yAxis.length - 1]);
  ax.frame(spec.xLabel, spec.yLabel);
  // colorbar
  const barX = W - MARGIN.right + 18;
  for (let i = 0; i < plotH; i += 1) {
    const t = 1 - i / (plotH - 1);
    const v = spec.scale === "diverging" ? amp * (2 * t - 1) : Math.min(vLo, 0) + t * (vHi - Math.min(vLo, 0));
    r.fillRect(barX, MARGIN.top + i, 16, 1, colorOf(v));
  }
  r.text(barX + 20, MARGIN.top - 2, fmt(spec.scale === "diverging" ? amp : vHi));
  r.text(barX + 20, H - MARGIN.bottom - 5, fmt(spec.scale === "diverging" ? -amp : Math.min(vLo, 0)));
  return { name: spec.name, png: encodePng(W, H, r.data), plotted };
}

export function renderFigure(spec: FigureSpec, csvPath: string): Rendered {
  const table = loadTable(csvPath);
  switch (spec.kind) {
    case "lines":
      return renderLines(spec, table);
    case "parametric":
      return renderParametric(spec, table);
    case "heatmap":
      return renderHeatmap(spec, table);
  }
}

/** The full default figure set, one image per figure. */
export const FIGURES: FigureSpec[] = [
  {
    kind: "lines",
    name: "count_rate",
    csv: "rate1.csv",
    x: "t",
    y: "total",
    extraYs: ["reflected", "transmitted", "interference"],
    xLabel: "t (1/kappa)",
    yLabel: "rate (kappa)",
  },
  {
    kind: "lines",
    name: "momentum",
    csv: "moments.csv",
    x: "t",
    y: "momentum",
    groupBy: "omega_m",
    xLabel: "t (1/kappa)",
    yLabel: "momentum",
  },
  {
    kind: "lines",
    name: "entropy",
    csv: "mz_entropy.csv",
    x: "t",
    y: "entropy",
    xLabel: "t (1/kappa)",
    yLabel: "entropy (nats)",
  },
  {
    kind: "parametric",
    name: "trajectory",
    csv: "mz_trajectory.csv",
    x: "re_b",
    y: "im_b",
    xLabel: "re<b>",
    yLabel: "im<b>",
  },
  {
    kind: "heatmap",
    name: "wigner_slice",
    csv: "mz_wigner.csv",
    x: "x1",
    y: "p1",
    v: "w",
    scale: "diverging",
    xLabel: "x1",
    yLabel: "p1",
  },
  {
    kind: "lines",
    name: "fidelity",
    csv: "mz_fidelity.csv",
    x: "delta",
    y: "fidelity",
    xLabel: "delta",
    yLabel: "fidelity",
  },
  {
    kind: "heatmap",
    name: "rate2_total",
    csv: "rate2.csv",
    x: "tau",
    y: "td",
    v: "total",
    scale: "sequential",
    xLabel: "tau (1/kappa)",
    yLabel: "t_d (1/kappa)",
  },
  {
    kind: "heatmap",
    name: "rate2_reflected",
    csv: "rate2.csv",
    x: "tau",
    y: "td",
    v: "reflected",
    scale: "sequential",
    xLabel: "tau (1/kappa)",
    yLabel: "t_d (1/kappa)",
  },
  {
    kind: "heatmap",
    name: "rate2_transmitted",
    csv: "rate2.csv",
    x: "tau",
    y: "td",
    v: "transmitted",
    scale: "sequential",
    xLabel: "tau (1/kappa)",
    yLabel: "t_d (1/kappa)",
  },
  {
    kind: "heatmap",
    name: "rate2_interference",
    csv: "rate2.csv",
    x: "tau",
    y: "td",
    v: "interference",
    scale: "diverging",
    xLabel: "tau (1/kappa)",
    yLabel: "t_d (1/kappa)",
  },
];
