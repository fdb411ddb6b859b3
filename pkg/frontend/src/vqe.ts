/**
 * View model for the descent dashboard: which energy series the chart
 * shows, and where a mitigated series comes from for a finished run.
 */

import { EventLog } from "./events.js";
import { RecordPayload, VqeIterationPayload, VqeResult } from "./wire.js";

export const THEORY_ENERGY = -3;

export type SeriesPoint = [iteration: number, energy: number];

export function iterationsOf(record: RecordPayload): VqeIterationPayload[] {
  const result = record.result as unknown as VqeResult | null;
  if (!result || !Array.isArray(result.iterations)) {
    return [];
  }
  return result.iterations;
}

export function rawSeries(iterations: readonly VqeIterationPayload[]): SeriesPoint[] {
  return iterations.map((it) => [it.iteration, it.energy_raw]);
}

export function objectiveSeries(iterations: readonly VqeIterationPayload[]): SeriesPoint[] {
  return iterations.map((it) => [it.iteration, it.energy]);
}

function sameAngles(a: number[], b: number[]): boolean {
  return a.length === b.length && a.every((v, i) => v === b[i]);
}

/**
 * Find the stored run whose mitigated series the CEM toggle should
 * plot: a finished vqe record with CNOT mitigation enabled, run in the
 * same mode from the same starting point as the record on screen.
 * Newest match wins.
 */
export function findMitigatedCompanion(
  current: RecordPayload,
  stored: readonly RecordPayload[],
): RecordPayload | null {
  const base = current.result as unknown as VqeResult | null;
  for (const candidate of stored) {
    if (candidate.kind !== "vqe" || candidate.status !== "done") {
      continue;
    }
    const result = candidate.result as unknown as VqeResult | null;
    if (!result || result.mitigation !== "cem") {
      continue;
    }
    if (candidate.mode !== current.mode) {
      continue;
    }
    if (
      base &&
      (!sameAngles(result.initial_theta, base.initial_theta) ||
        result.learning_rate !== base.learning_rate)
    ) {
      continue;
    }
    return candidate;
  }
  return null;
}

export interface ChartSelection {
  label: string;
  series: SeriesPoint[];
  /** Set when the toggle is on but no stored mitigated run matches. */
  missing?: string;
}

/**
 * The chart's contents for a finished record. With the toggle off the
 * record's own objective series is shown; with it on, the mitigated
 * series of the companion run (or of the record itself if it already
 * ran with CNOT mitigation).
 */
export function selectChartSeries(
  record: RecordPayload,
  mitigationOn: boolean,
  stored: readonly RecordPayload[],
): ChartSelection {
  const own = iterationsOf(record);
  const result = record.result as unknown as VqeResult | null;
  if (!mitigationOn) {
    return { label: labelFor(record), series: objectiveSeries(own) };
  }
  if (result && result.mitigation === "cem") {
    return { label: labelFor(record), series: objectiveSeries(own) };
  }
  const companion = findMitigatedCompanion(record, stored);
  if (!companion) {
    return {
      label: labelFor(record),
      series: objectiveSeries(own),
      missing: "no stored CNOT-mitigated run matches this configuration",
    };
  }
  return { label: `${labelFor(companion)} (stored run ${companion.id.slice(0, 8)})`,
    series: objectiveSeries(iterationsOf(companion)) };
}

function labelFor(record: RecordPayload): string {
  const result = record.result as unknown as VqeResult | null;
  const mitigation = result?.mitigation ?? "none";
  return mitigation === "none" ? `${record.mode}` : `${record.mode}+${mitigation}`;
}

/** Live chart series from the event log. */
export function liveSeries(log: EventLog, mitigated: boolean): SeriesPoint[] {
  return log.series(mitigated ? "energy" : "energy_raw");
}

export interface ChartGeometry {
  width: number;
  height: number;
  yMin: number;
  yMax: number;
  xMax: number;
}

export function chartGeometry(
  series: readonly SeriesPoint[][],
  width: number,
  height: number,
): ChartGeometry {
  let yMin = THEORY_ENERGY;
  let yMax = 1;
  let xMax = 1;
  for (const one of series) {
    for (const [iteration, energy] of one) {
      if (energy < yMin) yMin = energy;
      if (energy > yMax) yMax = energy;
      if (iteration > xMax) xMax = iteration;
    }
  }
  const pad = 0.08 * (yMax - yMin || 1);
  return { width, height, yMin: yMin - pad, yMax: yMax + pad, xMax };
}

export function toPolylinePoints(series: readonly SeriesPoint[], geom: ChartGeometry): string {
  return series
    .map(([iteration, energy]) => {
      const x = (iteration / geom.xMax) * geom.width;
      const y = geom.height - ((energy - geom.yMin) / (geom.yMax - geom.yMin)) * geom.height;
      return `${x.toFixed(1)},${y.toFixed(1)}`;
    })
    .join(" ");
}

export function yPixel(energy: number, geom: ChartGeometry): number {
  return geom.height - ((energy - geom.yMin) / (geom.yMax - geom.yMin)) * geom.height;
}
