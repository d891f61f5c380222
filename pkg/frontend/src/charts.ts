// Chart geometry as plain data: scales, polyline paths, breach segments.
// Rendering glue stuffs these into SVG elements; tests assert on the numbers.

import type { BandLimitsJson, SweepResponse, TraceSeriesJson } from "./types.js";

export interface Viewport {
  width: number;
  height: number;
  padding: number;
}

export interface LinearScale {
  (value: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(
  domain: [number, number],
  range: [number, number],
): LinearScale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((value: number) =>
    r0 + ((value - d0) / span) * (r1 - r0)) as LinearScale;
  scale.domain = domain;
  scale.range = range;
  return scale;
}

export function linePath(xs: number[], ys: number[]): string {
  if (xs.length === 0) return "";
  const parts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    parts.push(`${i === 0 ? "M" : "L"}${xs[i]!.toFixed(1)},${ys[i]!.toFixed(1)}`);
  }
  return parts.join(" ");
}

// -- trace chart ---------------------------------------------------------------

export interface BreachSegment {
  kind: "level_low" | "level_high";
  startMhz: number;
  endMhz: number;
}

/** Frequency spans where the series level leaves the allowed window for its
 * band. A span covers consecutive breaching points; single-point breaches
 * degenerate to a zero-width span at that frequency. The per-series
 * min/max_level_dbuv fields are summary stats of the trace, not limits. */
export function breachSegments(
  series: TraceSeriesJson,
  limits: BandLimitsJson,
): BreachSegment[] {
  const segments: BreachSegment[] = [];
  let open: BreachSegment | null = null;
  for (let i = 0; i < series.freqs_mhz.length; i++) {
    const level = series.levels_dbuv[i]!;
    const freq = series.freqs_mhz[i]!;
    let kind: BreachSegment["kind"] | null = null;
    if (level < limits.min_level_dbuv) kind = "level_low";
    else if (level > limits.max_level_dbuv) kind = "level_high";
    if (kind === null) {
      if (open) segments.push(open);
      open = null;
    } else if (open && open.kind === kind) {
      open.endMhz = freq;
    } else {
      if (open) segments.push(open);
      open = { kind, startMhz: freq, endMhz: freq };
    }
  }
  if (open) segments.push(open);
  return segments;
}

export interface TraceChart {
  path: string;
  minLimitY: number;
  maxLimitY: number;
  breaches: { kind: string; x0: number; x1: number }[];
  x: LinearScale;
  y: LinearScale;
}

export function traceChart(
  series: TraceSeriesJson,
  limits: BandLimitsJson,
  viewport: Viewport,
): TraceChart {
  const { width, height, padding } = viewport;
  const freqs = series.freqs_mhz;
  const levels = series.levels_dbuv;
  const xDomain: [number, number] = [freqs[0] ?? 0, freqs[freqs.length - 1] ?? 1];
  const low = Math.min(limits.min_level_dbuv, ...levels);
  const high = Math.max(limits.max_level_dbuv, ...levels);
  const margin = 0.05 * (high - low || 1);
  const x = linearScale(xDomain, [padding, width - padding]);
  const y = linearScale([low - margin, high + margin], [height - padding, padding]);
  return {
    path: linePath(freqs.map(x), levels.map(y)),
    minLimitY: y(limits.min_level_dbuv),
    maxLimitY: y(limits.max_level_dbuv),
    breaches: breachSegments(series, limits).map((b) => ({
      kind: b.kind,
      x0: x(b.startMhz),
      x1: x(b.endMhz),
    })),
    x,
    y,
  };
}

// -- sweep chart ---------------------------------------------------------------

export interface SweepChart {
  coarsePath: string;
  finePath: string;
  optimumRect: { x0: number; x1: number } | null;
  bestX: number | null;
  x: LinearScale;
  y: LinearScale;
}

export function sweepChart(
  sweep: SweepResponse,
  viewport: Viewport,
): SweepChart {
  const { width, height, padding } = viewport;
  const points = [...sweep.points, ...sweep.fine_points];
  const levels = points.map((p) => p.level_dbuv);
  const counts = points.map((p) => p.compliant_count);
  const x = linearScale(
    [Math.min(...levels), Math.max(...levels)],
    [padding, width - padding],
  );
  const y = linearScale(
    [0, Math.max(sweep.total_outputs, ...counts)],
    [height - padding, padding],
  );
  const coarse = [...sweep.points].sort((a, b) => a.level_dbuv - b.level_dbuv);
  const fine = [...sweep.fine_points].sort((a, b) => a.level_dbuv - b.level_dbuv);
  return {
    coarsePath: linePath(
      coarse.map((p) => x(p.level_dbuv)),
      coarse.map((p) => y(p.compliant_count)),
    ),
    finePath: linePath(
      fine.map((p) => x(p.level_dbuv)),
      fine.map((p) => y(p.compliant_count)),
    ),
    optimumRect: sweep.optimum_interval
      ? { x0: x(sweep.optimum_interval[0]), x1: x(sweep.optimum_interval[1]) }
      : null,
    bestX: sweep.best_level === null ? null : x(sweep.best_level),
    x,
    y,
  };
}
