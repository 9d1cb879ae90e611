/** Pure mapping from service responses to render-ready values.
 *
 * The advisor performs no statistical computation: every number that ends
 * up visible comes from a response field, formatted by `fmtNum`.  This
 * module may select response values (minimum, maximum, lookup by pool
 * size) but never derives new quantities from them; chart geometry is the
 * renderer's business and stays out of the visible text.
 */

import type {
  ErrorEnvelope,
  FitBetaResponse,
  MetricName,
  RecommendResponse,
  SimulateResponse,
  SweepResponse,
  SweepRowJson,
  CatalogResponse,
} from "./types.js";
import { METRIC_NAMES } from "./types.js";

/** One formatter for every visible number, so provenance is checkable. */
export function fmtNum(v: number): string {
  return Number.isInteger(v) ? String(v) : v.toFixed(3);
}

export interface SeriesPoint {
  n: number;
  value: number;
}

export interface BandPoint {
  n: number;
  lo: number;
  hi: number;
}

export interface GuideLine {
  cls: string;
  value: number;
  /** Words-only description; numeric part rendered via labelValue. */
  label: string;
  labelValue: string | null;
}

export interface ChartVM {
  metric: MetricName;
  title: string;
  series: SeriesPoint[];
  overlay: SeriesPoint[] | null;
  band: BandPoint[] | null;
  guides: GuideLine[];
  /** Axis end labels: the extreme plotted values themselves. */
  yMin: number;
  yMax: number;
  xTicks: { n: number; label: string }[];
}

export interface TableRowVM {
  n: string;
  cells: string[];
}

export interface TableVM {
  header: string[];
  rows: TableRowVM[];
}

export interface RecommendationVM {
  feasible: boolean;
  headline: string;
  details: string[];
  bindingLabel: string;
}

export interface AdvisorData {
  catalog?: CatalogResponse;
  sweep?: SweepResponse;
  simulate?: SimulateResponse;
  recommend?: RecommendResponse;
  /** 422 envelope from /api/recommend: infeasible constraints. */
  recommendError?: ErrorEnvelope["error"];
  /** Any other service error, surfaced as a non-blocking banner. */
  banner?: ErrorEnvelope["error"];
  fit?: FitBetaResponse;
}

const CHART_TITLES: Record<MetricName, string> = {
  sensitivity: "Pooled sensitivity",
  relative_sensitivity: "Sensitivity relative to individual testing",
  tests_per_sample: "Expected tests per sample",
  missed_per_sample: "Expected missed cases per sample",
};

const BINDING_LABELS: Record<string, string> = {
  min_sensitivity: "point-estimate sensitivity floor",
  min_pass_rate: "FDA sensitivity pass-rate floor",
  "min_sensitivity+min_pass_rate":
    "point-estimate sensitivity floor and FDA sensitivity pass-rate floor",
};

export function bindingLabel(code: string | null | undefined): string {
  if (!code) return "none";
  return BINDING_LABELS[code] ?? code;
}

function rowsByModel(sweep: SweepResponse): {
  correlated: SweepRowJson[];
  independent: SweepRowJson[];
} {
  const correlated = sweep.rows.filter((r) => r.model === "correlated");
  const independent = sweep.rows.filter((r) => r.model === "null");
  correlated.sort((a, b) => a.n - b.n);
  independent.sort((a, b) => a.n - b.n);
  return { correlated, independent };
}

function xTicks(ns: readonly number[]): { n: number; label: string }[] {
  const ticks: { n: number; label: string }[] = [];
  for (let i = 0; i < ns.length; i += 1) {
    const n = ns[i]!;
    if (i === 0 || i === ns.length - 1 || n % 5 === 0) {
      ticks.push({ n, label: String(n) });
    }
  }
  return ticks;
}

/** Extremes of everything plotted — a selection among response values. */
function extent(values: number[]): { min: number; max: number } {
  let min = values[0] ?? 0;
  let max = values[0] ?? 0;
  for (const v of values) {
    if (v < min) min = v;
    if (v > max) max = v;
  }
  return { min, max };
}

export function chartViewModels(data: AdvisorData): ChartVM[] {
  const sweep = data.sweep;
  const sim = data.simulate;
  if (!sweep && !sim) return [];
  const split = sweep ? rowsByModel(sweep) : null;
  const ns: number[] = split
    ? split.correlated.map((r) => r.n)
    : (sim as SimulateResponse).n;

  return METRIC_NAMES.map((metric) => {
    const series: SeriesPoint[] = split
      ? split.correlated.map((r) => ({ n: r.n, value: r[metric] }))
      : (sim as SimulateResponse).n.map((n, i) => ({
          n,
          value: (sim as SimulateResponse).metrics[metric].point[i]!,
        }));
    const overlay: SeriesPoint[] | null = split
      ? split.independent.map((r) => ({ n: r.n, value: r[metric] }))
      : null;
    const band: BandPoint[] | null = sim
      ? sim.n.map((n, i) => ({
          n,
          lo: sim.metrics[metric].lo[i]!,
          hi: sim.metrics[metric].hi[i]!,
        }))
      : null;

    const guides: GuideLine[] = [];
    const individual = series.find((p) => p.n === 1);
    if (individual) {
      guides.push({
        cls: "baseline",
        value: individual.value,
        label: "individual testing",
        labelValue: fmtNum(individual.value),
      });
    }
    if (metric === "sensitivity" && sim) {
      guides.push({
        cls: "fda-line",
        value: sim.fda_threshold,
        label: "FDA sensitivity threshold",
        labelValue: fmtNum(sim.fda_threshold),
      });
    }

    const plotted = [
      ...series.map((p) => p.value),
      ...(overlay ?? []).map((p) => p.value),
      ...(band ?? []).flatMap((b) => [b.lo, b.hi]),
      ...guides.map((g) => g.value),
    ];
    const { min, max } = extent(plotted);
    return {
      metric,
      title: CHART_TITLES[metric],
      series,
      overlay,
      band,
      guides,
      yMin: min,
      yMax: max,
      xTicks: xTicks(ns),
    };
  });
}

export function tableViewModel(data: AdvisorData): TableVM | null {
  const sweep = data.sweep;
  const sim = data.simulate;
  if (!sweep && !sim) return null;

  const header = ["pool size"];
  for (const metric of METRIC_NAMES) {
    if (sweep) header.push(`${CHART_TITLES[metric]} (network model)`);
    if (sweep) header.push(`${CHART_TITLES[metric]} (independent model)`);
    if (sim) header.push(`${CHART_TITLES[metric]} (credible band)`);
  }
  if (sim) header.push("FDA pass rate");

  const split = sweep ? rowsByModel(sweep) : null;
  const ns: number[] = split
    ? split.correlated.map((r) => r.n)
    : (sim as SimulateResponse).n;

  const rows: TableRowVM[] = ns.map((n, i) => {
    const cells: string[] = [];
    for (const metric of METRIC_NAMES) {
      if (split) {
        cells.push(fmtNum(split.correlated[i]![metric]));
        cells.push(fmtNum(split.independent[i]![metric]));
      }
      if (sim) {
        const j = sim.n.indexOf(n);
        cells.push(
          j < 0
            ? ""
            : `${fmtNum(sim.metrics[metric].lo[j]!)} to ${fmtNum(sim.metrics[metric].hi[j]!)}`,
        );
      }
    }
    if (sim) {
      const j = sim.n.indexOf(n);
      cells.push(j < 0 ? "" : fmtNum(sim.fda_pass_rate[j]!));
    }
    return { n: String(n), cells };
  });

  return { header, rows };
}

export function recommendationViewModel(data: AdvisorData): RecommendationVM | null {
  if (data.recommendError) {
    const err = data.recommendError;
    return {
      feasible: false,
      headline: "No pool size satisfies the constraints",
      details: [err.message],
      bindingLabel: bindingLabel(err.binding_constraint),
    };
  }
  const rec = data.recommend;
  if (!rec) return null;
  const idx = rec.result.n.indexOf(rec.n);
  const details: string[] = [];
  if (idx >= 0) {
    details.push(
      `expected tests per sample ${fmtNum(rec.result.metrics.tests_per_sample.point[idx]!)}`,
    );
    details.push(`sensitivity ${fmtNum(rec.result.metrics.sensitivity.point[idx]!)}`);
    details.push(`FDA pass rate ${fmtNum(rec.result.fda_pass_rate[idx]!)}`);
  }
  const first = rec.feasible_ns[0];
  const last = rec.feasible_ns[rec.feasible_ns.length - 1];
  if (first !== undefined && last !== undefined) {
    details.push(`feasible pool sizes ${fmtNum(first)} to ${fmtNum(last)}`);
  }
  return {
    feasible: true,
    headline: `Recommended pool size: ${fmtNum(rec.n)}`,
    details,
    bindingLabel: bindingLabel(rec.binding_constraint),
  };
}

export function fitSummary(fit: FitBetaResponse): string {
  return (
    `Beta(${fmtNum(fit.alpha)}, ${fmtNum(fit.beta)}) with mean ${fmtNum(fit.mean)}, ` +
    `fitted to the interval ${fmtNum(fit.lo)} to ${fmtNum(fit.hi)}`
  );
}
