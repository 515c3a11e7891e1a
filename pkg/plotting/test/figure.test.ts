import { describe, expect, it } from "vitest";

import { fmtTick, linearScale, logScale } from "../src/figure";
import { alignMean } from "../src/render";
import { clipSegment } from "../src/raster";

describe("fmtTick", () => {
  it("keeps small numbers plain", () => {
    expect(fmtTick(0)).toBe("0");
    expect(fmtTick(2.5)).toBe("2.5");
    expect(fmtTick(0.30000000000004)).toBe("0.3");
  });

  it("switches to exponent form outside [1e-3, 1e4)", () => {
    expect(fmtTick(5e-4)).toBe("5e-4");
    expect(fmtTick(120000)).toBe("1.2e5");
    expect(fmtTick(1e-8)).toBe("1e-8");
  });
});

describe("scales", () => {
  it("linear ticks cover the padded range on a 1-2-5 ladder", () => {
    const s = linearScale(0, 10, 100, 500);
    expect(s.ticks[0]).toBeLessThanOrEqual(0);
    expect(s.ticks[s.ticks.length - 1]).toBeGreaterThanOrEqual(9.5);
    expect(s.toPx(0)).toBeGreaterThan(100);
    expect(s.toPx(10)).toBeLessThan(500);
    for (let i = 1; i < s.ticks.length; i++) {
      expect(s.ticks[i]).toBeGreaterThan(s.ticks[i - 1]);
    }
  });

  it("handles a degenerate range", () => {
    const s = linearScale(3, 3, 0, 100);
    expect(s.toPx(3)).toBeCloseTo(50, 0);
  });

  it("log ticks are decade powers", () => {
    const s = logScale(1e-6, 1e2, 400, 0);
    for (const t of s.ticks) {
      const e = Math.log10(t);
      expect(Math.abs(e - Math.round(e))).toBeLessThan(1e-12);
    }
    expect(s.toPx(1e-6)).toBeGreaterThan(s.toPx(1e2));
  });

  it("log scale rejects nonpositive bounds", () => {
    expect(() => logScale(0, 1, 0, 100)).toThrow(/positive/);
  });
});

describe("alignMean", () => {
  it("averages equal-length runs pointwise", () => {
    expect(alignMean([[1, 3], [3, 5]])).toEqual([2, 4]);
  });

  it("pads shorter runs with their terminal value", () => {
    expect(alignMean([[2], [4, 6, 8]])).toEqual([3, 4, 5]);
  });
});

describe("clipSegment", () => {
  const box = { x0: 0, y0: 0, x1: 10, y1: 10 };

  it("keeps interior segments", () => {
    expect(clipSegment(1, 1, 9, 9, box)).toEqual([1, 1, 9, 9]);
  });

  it("clips a crossing segment to the box", () => {
    const seg = clipSegment(-5, 5, 15, 5, box)!;
    expect(seg[0]).toBe(0);
    expect(seg[2]).toBe(10);
  });

  it("drops fully outside and nonfinite segments", () => {
    expect(clipSegment(20, 20, 30, 30, box)).toBeNull();
    expect(clipSegment(0, 0, Infinity, 5, box)).toBeNull();
    expect(clipSegment(NaN, 0, 5, 5, box)).toBeNull();
  });
});
