import { writeFileSync } from "fs";
import { basename } from "path";
import { PNG } from "pngjs";

import { InputError, Table, column, readTable, requireColumns } from "./csv";
import { Figure, LegendEntry, Scale, linearScale, logScale } from "./figure";
import { PALETTE } from "./raster";

export type Kind = "trajectory" | "front" | "residuals";

export interface FigureSpec {
  kind: Kind;
  inputs: string[];
  out: string;
  logY: boolean;
}

export const WIDTH = 640;
export const HEIGHT = 480;

// per-iteration trace contract of the solver CLI (objective columns follow)
export const TRACE_COLUMNS = [
  "k",
  "alpha",
  "theta",
  "gamma",
  "feas",
  "kkt",
  "gap_est",
  "gap_stale",
  "wall_time",
];

const RESIDUAL_SERIES = ["feas", "kkt", "gap_est"] as const;

/** Mean across runs at each index; shorter runs repeat their last value. */
export function alignMean(runs: number[][]): number[] {
  const len = Math.max(...runs.map((r) => r.length));
  const out = new Array<number>(len);
  for (let i = 0; i < len; i++) {
    let s = 0;
    for (const r of runs) {
      s += i < r.length ? r[i] : r[r.length - 1];
    }
    out[i] = s / runs.length;
  }
  return out;
}

function dataRange(values: number[], positiveOnly: boolean): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (!isFinite(v)) continue;
    if (positiveOnly && v <= 0) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!(lo <= hi)) {
    throw new InputError(positiveOnly ? "no positive data to plot on a log axis" : "no finite data to plot");
  }
  return [lo, hi];
}

function makeScale(lo: number, hi: number, pxLo: number, pxHi: number, log: boolean): Scale {
  return log ? logScale(lo, hi, pxLo, pxHi) : linearScale(lo, hi, pxLo, pxHi);
}

function renderResiduals(spec: FigureSpec, tables: Table[]): Figure {
  const series = new Map<string, number[]>();
  for (const name of RESIDUAL_SERIES) {
    const runs = tables.map((t) => column(t, requireColumns(t, TRACE_COLUMNS).get(name)!));
    series.set(name, alignMean(runs));
  }
  const kMax = Math.max(...[...series.values()].map((s) => s.length)) - 1;
  const all = ([] as number[]).concat(...series.values());
  const [lo, hi] = dataRange(all, true);

  const fig = new Figure(WIDTH, HEIGHT);
  fig.setScales(
    linearScale(0, Math.max(kMax, 1), fig.box.x0, fig.box.x1),
    makeScale(lo, hi, fig.box.y1, fig.box.y0, true)
  );
  const legend: LegendEntry[] = [];
  RESIDUAL_SERIES.forEach((name, i) => {
    const vals = series.get(name)!;
    fig.polyline([...vals.keys()], vals, PALETTE[i], 2);
    legend.push({ label: name, color: PALETTE[i] });
  });
  fig.legend(legend);
  fig.title("residuals");
  fig.xlabel("k");
  fig.ylabel("residual");
  if (tables.length > 1) {
    const lens = tables.map((t) => t.rows.length);
    const padded = Math.min(...lens) !== Math.max(...lens);
    fig.note(
      `mean of ${tables.length} runs` + (padded ? ", shorter runs padded with terminal values" : "")
    );
  }
  return fig;
}

function renderFront(spec: FigureSpec, tables: Table[]): Figure {
  const pts = tables.map((t) => {
    const idx = requireColumns(t, ["f_1", "f_2", "feas"]);
    return { f1: column(t, idx.get("f_1")!), f2: column(t, idx.get("f_2")!) };
  });
  const [xLo, xHi] = dataRange(([] as number[]).concat(...pts.map((p) => p.f1)), false);
  const [yLo, yHi] = dataRange(([] as number[]).concat(...pts.map((p) => p.f2)), spec.logY);

  const fig = new Figure(WIDTH, HEIGHT);
  fig.setScales(
    linearScale(xLo, xHi, fig.box.x0, fig.box.x1),
    makeScale(yLo, yHi, fig.box.y1, fig.box.y0, spec.logY)
  );
  pts.forEach((p, i) => fig.scatter(p.f1, p.f2, PALETTE[i % PALETTE.length]));
  if (tables.length > 1) {
    fig.legend(tables.map((t, i) => ({ label: basename(t.path), color: PALETTE[i % PALETTE.length] })));
  }
  fig.title("front");
  fig.xlabel("f_1");
  fig.ylabel("f_2");
  return fig;
}

function renderTrajectory(spec: FigureSpec, tables: Table[]): Figure {
  const paths = tables.map((t) => {
    const idx = requireColumns(t, ["t", "x_1", "x_2"]);
    return { x1: column(t, idx.get("x_1")!), x2: column(t, idx.get("x_2")!) };
  });
  const [xLo, xHi] = dataRange(([] as number[]).concat(...paths.map((p) => p.x1)), false);
  const [yLo, yHi] = dataRange(([] as number[]).concat(...paths.map((p) => p.x2)), spec.logY);

  const fig = new Figure(WIDTH, HEIGHT);
  fig.setScales(
    linearScale(xLo, xHi, fig.box.x0, fig.box.x1),
    makeScale(yLo, yHi, fig.box.y1, fig.box.y0, spec.logY)
  );
  paths.forEach((p, i) => {
    const color = PALETTE[i % PALETTE.length];
    fig.polyline(p.x1, p.x2, color, 2);
    // hollow start, solid end
    fig.marker(p.x1[0], p.x2[0], color, 4);
    fig.marker(p.x1[0], p.x2[0], [255, 255, 255], 2);
    fig.marker(p.x1[p.x1.length - 1], p.x2[p.x2.length - 1], color, 4);
  });
  if (tables.length > 1) {
    fig.legend(tables.map((t, i) => ({ label: basename(t.path), color: PALETTE[i % PALETTE.length] })));
  }
  fig.title("trajectory");
  fig.xlabel("x_1");
  fig.ylabel("x_2");
  return fig;
}

/** Compose the figure for spec and write the PNG; nothing is written on error. */
export function render(spec: FigureSpec): void {
  if (spec.inputs.length === 0) {
    throw new InputError("at least one input CSV is required");
  }
  const tables = spec.inputs.map(readTable);
  let fig: Figure;
  switch (spec.kind) {
    case "residuals":
      fig = renderResiduals(spec, tables);
      break;
    case "front":
      fig = renderFront(spec, tables);
      break;
    case "trajectory":
      fig = renderTrajectory(spec, tables);
      break;
    default:
      throw new InputError(`unknown figure kind: ${spec.kind}`);
  }
  const png = new PNG({ width: WIDTH, height: HEIGHT });
  fig.raster.data.forEach((v, i) => {
    png.data[i] = v;
  });
  writeFileSync(spec.out, PNG.sync.write(png, { deflateLevel: 9 }));
}
