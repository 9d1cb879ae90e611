/** Wire types for the pool-design JSON API, mirrored field-for-field. */

export type ModelName = "null" | "correlated";

export type MetricName =
  | "sensitivity"
  | "relative_sensitivity"
  | "tests_per_sample"
  | "missed_per_sample";

export const METRIC_NAMES: readonly MetricName[] = [
  "sensitivity",
  "relative_sensitivity",
  "tests_per_sample",
  "missed_per_sample",
];

export type PriorJson =
  | { point: number }
  | { beta: { alpha: number; beta: number } }
  | { ci95: { lo: number; hi: number } };

export interface CurveJson {
  kind: "step" | "logistic";
  lod: number;
  width?: number | null;
}

export interface WeibullJson {
  shape: number;
  scale: number;
}

export interface CatalogEntryJson {
  name: string;
  parameter: "prevalence" | "transmission";
  stated_mean: number;
  display_ci: number[];
  effective_ci: number[];
  beta: { alpha: number; beta: number };
  citation: string;
}

export interface CatalogResponse {
  entries: CatalogEntryJson[];
  version: string;
}

export interface SweepRowJson {
  model: ModelName;
  n: number;
  pi: number;
  tau: number;
  sensitivity: number;
  relative_sensitivity: number;
  tests_per_sample: number;
  missed_per_sample: number;
  p_positive_pool: number;
  missed_literal?: number;
}

export interface SweepResponse {
  rows: SweepRowJson[];
  seed: number;
  version: string;
  config: Record<string, unknown> & { pi_point: number; tau_point: number };
}

export interface BandJson {
  point: number[];
  lo: number[];
  median: number[];
  hi: number[];
}

export interface ScenarioEchoJson {
  name: string;
  pi: PriorJson;
  tau: PriorJson;
}

export interface SimulateResponse {
  scenario: ScenarioEchoJson;
  setting: string;
  replicates: number;
  seed: number;
  n: number[];
  metrics: Record<MetricName, BandJson>;
  fda_pass_rate: number[];
  fda_threshold: number;
  version: string;
  config: Record<string, unknown>;
}

export interface RecommendResponse {
  n: number;
  objective: string;
  feasible_ns: number[];
  binding_constraint: string | null;
  result: Omit<SimulateResponse, "fda_threshold" | "version" | "config">;
  seed: number;
  version: string;
  config: Record<string, unknown>;
}

export interface FitBetaResponse {
  alpha: number;
  beta: number;
  mean: number;
  lo: number;
  hi: number;
  p_lo: number;
  p_hi: number;
  version: string;
}

export interface ErrorEnvelope {
  error: {
    code: string;
    message: string;
    binding_constraint?: string | null;
  };
}

export function isErrorEnvelope(x: unknown): x is ErrorEnvelope {
  return (
    typeof x === "object" &&
    x !== null &&
    "error" in x &&
    typeof (x as ErrorEnvelope).error?.message === "string"
  );
}
