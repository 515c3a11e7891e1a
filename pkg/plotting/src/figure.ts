import {
  BLACK,
  Color,
  DARK_GREY,
  FONT_HEIGHT,
  GREY,
  Raster,
  Rect,
  WHITE,
  clipSegment,
  textWidth,
} from "./raster";
import { InputError } from "./csv";

export interface Scale {
  toPx(v: number): number;
  ticks: number[];
  log: boolean;
}

/** Round tick step to the 1-2-5 ladder. */
function niceStep(span: number, target: number): number {
  const raw = span / target;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const m of [1, 2, 5, 10]) {
    if (m * mag >= raw) return m * mag;
  }
  return 10 * mag;
}

export function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    const e = v.toExponential(2).replace("e+", "e");
    // drop trailing zeros in the mantissa: 1.00e-3 -> 1e-3, 2.50e6 -> 2.5e6
    return e.replace(/\.?0+e/, "e");
  }
  return String(parseFloat(v.toPrecision(6)));
}

export function linearScale(lo: number, hi: number, pxLo: number, pxHi: number): Scale {
  if (!(isFinite(lo) && isFinite(hi))) throw new InputError("axis range is not finite");
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  const pad = 0.04 * (hi - lo);
  const a = lo - pad;
  const b = hi + pad;
  const step = niceStep(b - a, 5);
  const ticks: number[] = [];
  for (let t = Math.ceil(a / step) * step; t <= b + 1e-9 * step; t += step) {
    ticks.push(Math.abs(t) < 1e-12 * step ? 0 : t);
  }
  return {
    toPx: (v) => pxLo + ((v - a) / (b - a)) * (pxHi - pxLo),
    ticks,
    log: false,
  };
}

export function logScale(lo: number, hi: number, pxLo: number, pxHi: number): Scale {
  if (!(lo > 0 && hi > 0 && isFinite(lo) && isFinite(hi))) {
    throw new InputError("log axis needs positive finite data");
  }
  let a = Math.log10(lo);
  let b = Math.log10(hi);
  if (a === b) {
    a -= 0.5;
    b += 0.5;
  }
  const pad = 0.04 * (b - a);
  a -= pad;
  b += pad;
  const stride = Math.max(1, Math.ceil((b - a) / 8));
  const ticks: number[] = [];
  for (let e = Math.ceil(a); e <= Math.floor(b); e += stride) {
    ticks.push(Math.pow(10, e));
  }
  return {
    toPx: (v) => pxLo + ((Math.log10(v) - a) / (b - a)) * (pxHi - pxLo),
    ticks,
    log: true,
  };
}

export interface LegendEntry {
  label: string;
  color: Color;
}

const MARGIN = { left: 72, right: 16, top: 28, bottom: 46 };

/** One panel: axes box, two scales, polylines/scatters in data space. */
export class Figure {
  readonly raster: Raster;
  readonly box: Rect;
  private xs: Scale | null = null;
  private ys: Scale | null = null;

  constructor(width: number, height: number) {
    this.raster = new Raster(width, height);
    this.box = {
      x0: MARGIN.left,
      y0: MARGIN.top,
      x1: width - MARGIN.right,
      y1: height - MARGIN.bottom,
    };
  }

  setScales(xs: Scale, ys: Scale): void {
    this.xs = xs;
    this.ys = ys;
    const r = this.raster;
    for (const t of xs.ticks) {
      const px = Math.round(xs.toPx(t));
      r.line(px, this.box.y0, px, this.box.y1, GREY);
    }
    for (const t of ys.ticks) {
      const py = Math.round(ys.toPx(t));
      r.line(this.box.x0, py, this.box.x1, py, GREY);
    }
    r.strokeRect(this.box, BLACK);
    for (const t of xs.ticks) {
      const px = Math.round(xs.toPx(t));
      r.line(px, this.box.y1, px, this.box.y1 + 4, BLACK);
      const label = fmtTick(t);
      r.text(px - Math.floor(textWidth(label) / 2), this.box.y1 + 8, label, BLACK);
    }
    for (const t of ys.ticks) {
      const py = Math.round(ys.toPx(t));
      r.line(this.box.x0 - 4, py, this.box.x0, py, BLACK);
      const label = fmtTick(t);
      r.text(this.box.x0 - 8 - textWidth(label), py - 3, label, BLACK);
    }
  }

  title(s: string): void {
    const px = Math.floor((this.box.x0 + this.box.x1) / 2 - textWidth(s, 2) / 2);
    this.raster.text(px, 8, s, BLACK, 2);
  }

  xlabel(s: string): void {
    const px = Math.floor((this.box.x0 + this.box.x1) / 2 - textWidth(s) / 2);
    this.raster.text(px, this.box.y1 + 22, s, BLACK);
  }

  /** Horizontal y-axis caption above the top-left corner of the box. */
  ylabel(s: string): void {
    this.raster.text(this.box.x0, this.box.y0 - FONT_HEIGHT - 4, s, BLACK);
  }

  note(s: string): void {
    this.raster.text(this.box.x0, this.box.y1 + 34, s, DARK_GREY);
  }

  polyline(xv: number[], yv: number[], color: Color, thick = 1): void {
    const { xs, ys } = this.scales();
    let prev: [number, number] | null = null;
    for (let i = 0; i < xv.length; i++) {
      const ok =
        isFinite(xv[i]) && isFinite(yv[i]) && (!xs.log || xv[i] > 0) && (!ys.log || yv[i] > 0);
      if (!ok) {
        prev = null;
        continue;
      }
      const cur: [number, number] = [xs.toPx(xv[i]), ys.toPx(yv[i])];
      if (prev !== null) {
        const seg = clipSegment(prev[0], prev[1], cur[0], cur[1], this.box);
        if (seg !== null) this.raster.line(seg[0], seg[1], seg[2], seg[3], color, thick);
      }
      prev = cur;
    }
  }

  scatter(xv: number[], yv: number[], color: Color, r = 2): void {
    const { xs, ys } = this.scales();
    for (let i = 0; i < xv.length; i++) {
      const ok =
        isFinite(xv[i]) && isFinite(yv[i]) && (!xs.log || xv[i] > 0) && (!ys.log || yv[i] > 0);
      if (!ok) continue;
      const px = xs.toPx(xv[i]);
      const py = ys.toPx(yv[i]);
      if (px < this.box.x0 || px > this.box.x1 || py < this.box.y0 || py > this.box.y1) continue;
      this.raster.disc(px, py, r, color);
    }
  }

  marker(x: number, y: number, color: Color, r: number): void {
    const { xs, ys } = this.scales();
    if (!(isFinite(x) && isFinite(y))) return;
    this.raster.disc(xs.toPx(x), ys.toPx(y), r, color);
  }

  legend(entries: LegendEntry[]): void {
    if (entries.length === 0) return;
    const widest = Math.max(...entries.map((e) => textWidth(e.label)));
    const w = widest + 26;
    const h = entries.length * 12 + 6;
    const x0 = this.box.x1 - w - 6;
    const y0 = this.box.y0 + 6;
    this.raster.fillRect(x0, y0, x0 + w, y0 + h, WHITE);
    this.raster.strokeRect({ x0, y0, x1: x0 + w, y1: y0 + h }, DARK_GREY);
    entries.forEach((e, i) => {
      const cy = y0 + 6 + 12 * i;
      this.raster.fillRect(x0 + 4, cy + 2, x0 + 16, cy + 4, e.color);
      this.raster.text(x0 + 20, cy, e.label, BLACK);
    });
  }

  private scales(): { xs: Scale; ys: Scale } {
    if (this.xs === null || this.ys === null) {
      throw new Error("setScales must run before drawing data");
    }
    return { xs: this.xs, ys: this.ys };
  }
}
