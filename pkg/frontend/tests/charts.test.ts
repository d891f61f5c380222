import { describe, expect, it } from "vitest";

import {
  breachSegments,
  linePath,
  linearScale,
  sweepChart,
  traceChart,
  type Viewport,
} from "../src/charts.js";
import type { SweepResponse, TraceResponse } from "../src/types.js";
import { loadFixture } from "./fake.js";

const trace = loadFixture<TraceResponse>("trace_out_f5a2_sat1.json");
const sweep = loadFixture<SweepResponse>("sweep.json");
const viewport: Viewport = { width: 520, height: 140, padding: 24 };

describe("linearScale", () => {
  it("maps the domain onto the range linearly", () => {
    const scale = linearScale([0, 10], [100, 200]);
    expect(scale(0)).toBe(100);
    expect(scale(5)).toBe(150);
    expect(scale(10)).toBe(200);
  });
});

describe("linePath", () => {
  it("emits a move followed by line segments", () => {
    expect(linePath([1, 2, 3], [4, 5, 6])).toBe("M1.0,4.0 L2.0,5.0 L3.0,6.0");
    expect(linePath([], [])).toBe("");
  });
});

describe("breachSegments", () => {
  it("finds the low-level breach on the failing output's SAT lines", () => {
    const sat = trace.series.find((s) => s.band === "sat_if")!;
    const limits = trace.limits["sat_if"]!;
    const segments = breachSegments(sat, limits);
    expect(segments.length).toBeGreaterThan(0);
    expect(segments.every((s) => s.kind === "level_low")).toBe(true);
    // the fixture's failing output sits 1.12 dB under the SAT floor
    expect(Math.min(...sat.levels_dbuv)).toBeLessThan(limits.min_level_dbuv);
  });

  it("reports the terrestrial line of the same output as clear", () => {
    const terr = trace.series.find((s) => s.band === "terrestrial")!;
    expect(breachSegments(terr, trace.limits["terrestrial"]!)).toEqual([]);
  });

  it("splits disjoint excursions into separate segments", () => {
    const series = {
      line: "TERR",
      band: "terrestrial" as const,
      freqs_mhz: [100, 200, 300, 400, 500],
      levels_dbuv: [50, 70, 90, 70, 50],
      cnr_db: null,
      min_level_dbuv: 50,
      max_level_dbuv: 90,
      min_cnr_db: null,
    };
    const limits = { min_level_dbuv: 57, max_level_dbuv: 80, min_cnr_db: null };
    expect(breachSegments(series, limits)).toEqual([
      { kind: "level_low", startMhz: 100, endMhz: 100 },
      { kind: "level_high", startMhz: 300, endMhz: 300 },
      { kind: "level_low", startMhz: 500, endMhz: 500 },
    ]);
  });
});

describe("traceChart", () => {
  it("places breach rectangles and limit lines inside the viewport", () => {
    const sat = trace.series.find((s) => s.band === "sat_if")!;
    const chart = traceChart(sat, trace.limits["sat_if"]!, viewport);
    expect(chart.path.startsWith("M")).toBe(true);
    expect(chart.breaches.length).toBeGreaterThan(0);
    for (const breach of chart.breaches) {
      expect(breach.x0).toBeGreaterThanOrEqual(viewport.padding);
      expect(breach.x1).toBeLessThanOrEqual(viewport.width - viewport.padding);
    }
    // SVG y grows downward, so the level floor sits below the ceiling
    expect(chart.minLimitY).toBeGreaterThan(chart.maxLimitY);
  });
});

describe("sweepChart", () => {
  it("shades the optimum interval and marks the best level inside it", () => {
    const chart = sweepChart(sweep, viewport);
    expect(chart.coarsePath.startsWith("M")).toBe(true);
    expect(chart.finePath.startsWith("M")).toBe(true);
    expect(chart.optimumRect).not.toBeNull();
    const { x0, x1 } = chart.optimumRect!;
    expect(x0).toBeLessThan(x1);
    expect(chart.bestX).toBeGreaterThanOrEqual(x0);
    expect(chart.bestX).toBeLessThanOrEqual(x1);
  });

  it("omits the shading when no level passes everywhere", () => {
    const hopeless: SweepResponse = {
      ...sweep,
      optimum_interval: null,
      best_level: null,
    };
    const chart = sweepChart(hopeless, viewport);
    expect(chart.optimumRect).toBeNull();
    expect(chart.bestX).toBeNull();
  });
});
