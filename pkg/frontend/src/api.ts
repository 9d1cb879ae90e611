/** Request construction and transport.
 *
 * Builders map AdvisorState to request bodies deterministically: priors,
 * scenario, setting, replicates, and the pool-size range are always
 * explicit; engine knobs are omitted when they equal the service defaults,
 * so two states that resolve to the same configuration produce identical
 * bodies.  The client tags each call with a monotone id per control group
 * and discards responses that a newer call has superseded.
 */

import type { AdvisorState, PriorInput } from "./state.js";
import { SERVICE_DEFAULTS } from "./state.js";
import type {
  CatalogEntryJson,
  ErrorEnvelope,
  PriorJson,
} from "./types.js";
import { isErrorEnvelope } from "./types.js";

export interface ApiRequest {
  method: "GET" | "POST";
  path: string;
  body: Record<string, unknown> | null;
}

export type CatalogIndex = ReadonlyMap<string, CatalogEntryJson>;

export function catalogIndex(entries: readonly CatalogEntryJson[]): CatalogIndex {
  return new Map(entries.map((e) => [e.name, e]));
}

function priorJson(p: PriorInput): PriorJson {
  switch (p.kind) {
    case "point":
      return { point: p.value };
    case "beta":
      return { beta: { alpha: p.alpha, beta: p.beta } };
    case "ci95":
      return { ci95: { lo: p.lo, hi: p.hi } };
  }
}

/** Catalog entries carry the service's own Beta parameters; custom priors
 * pass through as entered. */
function resolvePriors(
  state: AdvisorState,
  catalog: CatalogIndex,
): { pi: PriorJson; tau: PriorJson } {
  if (state.prevalenceName !== null && state.transmissionName !== null) {
    const prev = catalog.get(state.prevalenceName);
    const trans = catalog.get(state.transmissionName);
    if (!prev || !trans) {
      throw new Error(
        `catalog entry not loaded: ${!prev ? state.prevalenceName : state.transmissionName}`,
      );
    }
    return {
      pi: { beta: { alpha: prev.beta.alpha, beta: prev.beta.beta } },
      tau: { beta: { alpha: trans.beta.alpha, beta: trans.beta.beta } },
    };
  }
  if (state.pi === null || state.tau === null) {
    throw new Error("state needs either two catalog names or two custom priors");
  }
  return { pi: priorJson(state.pi), tau: priorJson(state.tau) };
}

function engineOptions(state: AdvisorState): Record<string, unknown> {
  const d = SERVICE_DEFAULTS;
  const out: Record<string, unknown> = { n_range: [state.nLo, state.nHi] };
  if (state.curveKind !== d.curveKind || state.lod !== d.lod) {
    out.curve =
      state.curveKind === "step"
        ? { kind: "step", lod: state.lod }
        : { kind: "logistic", lod: state.lod, width: state.curveWidth };
  }
  if (state.weibullShape !== d.weibullShape || state.weibullScale !== d.weibullScale) {
    out.weibull = { shape: state.weibullShape, scale: state.weibullScale };
  }
  if (state.tailFraction !== d.tailFraction) out.tail_fraction = state.tailFraction;
  if (state.tailCt !== d.tailCt) out.tail_ct = state.tailCt;
  if (state.draws !== d.draws) out.draws = state.draws;
  if (state.seed !== null) out.seed = state.seed;
  return out;
}

function scenarioSpec(state: AdvisorState): Record<string, unknown> {
  if (state.prevalenceName !== null && state.transmissionName !== null) {
    return {
      prevalence_name: state.prevalenceName,
      transmission_name: state.transmissionName,
    };
  }
  if (state.pi === null || state.tau === null) {
    throw new Error("state needs either two catalog names or two custom priors");
  }
  return { pi: priorJson(state.pi), tau: priorJson(state.tau) };
}

export function buildCatalogRequest(): ApiRequest {
  return { method: "GET", path: "/api/catalog", body: null };
}

/** Point curves for both models at the priors' means: the chart backbone
 * and the source of the independent-infection overlay. */
export function buildSweepRequest(state: AdvisorState, catalog: CatalogIndex): ApiRequest {
  const { pi, tau } = resolvePriors(state, catalog);
  return {
    method: "POST",
    path: "/api/sweep",
    body: { pi, tau, ...engineOptions(state) },
  };
}

/** Credible bands, pass rates, and the threshold echo. */
export function buildSimulateRequest(state: AdvisorState): ApiRequest {
  const body: Record<string, unknown> = {
    scenario: scenarioSpec(state),
    setting: state.setting,
    replicates: state.replicates,
    ...engineOptions(state),
  };
  if (state.fdaThreshold !== SERVICE_DEFAULTS.fdaThreshold) {
    body.fda_threshold = state.fdaThreshold;
  }
  return { method: "POST", path: "/api/simulate", body };
}

export function buildRecommendRequest(state: AdvisorState): ApiRequest {
  const body = buildSimulateRequest(state).body as Record<string, unknown>;
  if (state.minSensitivity !== null) body.min_sensitivity = state.minSensitivity;
  if (state.minPassRate !== null) body.min_pass_rate = state.minPassRate;
  if (state.objective !== SERVICE_DEFAULTS.objective) body.objective = state.objective;
  return { method: "POST", path: "/api/recommend", body };
}

export function buildFitBetaRequest(lo: number, hi: number): ApiRequest {
  return { method: "POST", path: "/api/fit-beta", body: { lo, hi } };
}

// ── transport ────────────────────────────────────────────────────────────────

/** The slice of fetch the client needs; tests substitute their own. */
export type FetchLike = (
  url: string,
  init: { method: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; json(): Promise<unknown> }>;

export type ApiOutcome<T> =
  | { kind: "ok"; data: T }
  | { kind: "error"; status: number; error: ErrorEnvelope["error"] }
  | { kind: "stale" };

export class AdvisorClient {
  private counter = 0;
  private latest = new Map<string, number>();

  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike,
  ) {}

  /** One in-flight request per control group: a response is delivered only
   * if no newer request in the same group has started since. */
  async send<T>(group: string, req: ApiRequest): Promise<ApiOutcome<T>> {
    const id = ++this.counter;
    this.latest.set(group, id);
    const init: Parameters<FetchLike>[1] = { method: req.method };
    if (req.body !== null) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(req.body);
    }
    let status: number;
    let payload: unknown;
    try {
      const res = await this.fetchFn(this.baseUrl + req.path, init);
      status = res.status;
      payload = await res.json();
    } catch (e) {
      if (this.latest.get(group) !== id) return { kind: "stale" };
      return {
        kind: "error",
        status: 0,
        error: { code: "network", message: String(e) },
      };
    }
    if (this.latest.get(group) !== id) return { kind: "stale" };
    if (isErrorEnvelope(payload)) {
      return { kind: "error", status, error: payload.error };
    }
    return { kind: "ok", data: payload as T };
  }
}

/** Trailing-edge debounce for control groups. */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  ms: number,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (timer !== undefined) clearTimeout(timer);
    timer = setTimeout(() => fn(...args), ms);
  };
}
