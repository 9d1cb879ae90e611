/** Advisor state and its loss-free mapping to/from the URL query string.
 *
 * Every field an operator can touch lives here, so a URL reproduces the
 * exact same API requests (including the seed) on another machine.  Numbers
 * are written with their shortest JavaScript representation, which `Number`
 * parses back bit-for-bit.
 */

export type PriorInput =
  | { kind: "point"; value: number }
  | { kind: "beta"; alpha: number; beta: number }
  | { kind: "ci95"; lo: number; hi: number };

export type SettingKind = "fixed" | "tau_graph" | "pi_graph" | "all_graph";
export type Objective = "min_tests" | "max_savings";

export interface AdvisorState {
  /** Catalog mode: both names set; custom mode: both priors set. */
  prevalenceName: string | null;
  transmissionName: string | null;
  pi: PriorInput | null;
  tau: PriorInput | null;

  nLo: number;
  nHi: number;
  setting: SettingKind;
  replicates: number;

  curveKind: "step" | "logistic";
  lod: number;
  curveWidth: number | null;
  tailFraction: number;
  tailCt: number;
  weibullShape: number;
  weibullScale: number;
  draws: number;

  minSensitivity: number | null;
  minPassRate: number | null;
  objective: Objective;
  fdaThreshold: number;
  seed: number | null;
}

/** Engine-side defaults; the request builders omit fields that match. */
export const SERVICE_DEFAULTS = {
  nLo: 1,
  nHi: 30,
  setting: "all_graph" as SettingKind,
  replicates: 100,
  curveKind: "step" as const,
  lod: 35.0,
  tailFraction: 0.25,
  tailCt: 35.0,
  weibullShape: 4.5,
  weibullScale: 30.0,
  draws: 100_000,
  objective: "min_tests" as Objective,
  fdaThreshold: 0.85,
};

export function defaultState(): AdvisorState {
  return {
    prevalenceName: "Maine, October 2020",
    transmissionName: "Household (Spouses)",
    pi: null,
    tau: null,
    nLo: SERVICE_DEFAULTS.nLo,
    nHi: SERVICE_DEFAULTS.nHi,
    setting: SERVICE_DEFAULTS.setting,
    replicates: SERVICE_DEFAULTS.replicates,
    curveKind: SERVICE_DEFAULTS.curveKind,
    lod: SERVICE_DEFAULTS.lod,
    curveWidth: null,
    tailFraction: SERVICE_DEFAULTS.tailFraction,
    tailCt: SERVICE_DEFAULTS.tailCt,
    weibullShape: SERVICE_DEFAULTS.weibullShape,
    weibullScale: SERVICE_DEFAULTS.weibullScale,
    draws: SERVICE_DEFAULTS.draws,
    minSensitivity: null,
    minPassRate: SERVICE_DEFAULTS.fdaThreshold,
    objective: SERVICE_DEFAULTS.objective,
    fdaThreshold: SERVICE_DEFAULTS.fdaThreshold,
    seed: null,
  };
}

const SETTINGS: readonly SettingKind[] = ["fixed", "tau_graph", "pi_graph", "all_graph"];
const OBJECTIVES: readonly Objective[] = ["min_tests", "max_savings"];

function priorToText(p: PriorInput): string {
  switch (p.kind) {
    case "point":
      return `point:${p.value}`;
    case "beta":
      return `beta:${p.alpha},${p.beta}`;
    case "ci95":
      return `ci:${p.lo},${p.hi}`;
  }
}

function priorFromText(text: string): PriorInput {
  const sep = text.indexOf(":");
  const tag = sep < 0 ? "" : text.slice(0, sep);
  const rest = text.slice(sep + 1);
  if (tag === "point") return { kind: "point", value: numOrThrow(rest) };
  const parts = rest.split(",");
  if (parts.length !== 2) throw new Error(`prior needs two values: ${text}`);
  const [a, b] = [numOrThrow(parts[0]!), numOrThrow(parts[1]!)];
  if (tag === "beta") return { kind: "beta", alpha: a, beta: b };
  if (tag === "ci") return { kind: "ci95", lo: a, hi: b };
  throw new Error(`unknown prior form: ${text}`);
}

function numOrThrow(text: string): number {
  const v = Number(text);
  if (!Number.isFinite(v)) throw new Error(`not a number: ${text}`);
  return v;
}

/** Serialize to a query string; fields at their defaults are omitted. */
export function stateToQuery(state: AdvisorState): string {
  const q = new URLSearchParams();
  const d = defaultState();
  if (state.prevalenceName !== null) q.set("prev", state.prevalenceName);
  if (state.transmissionName !== null) q.set("trans", state.transmissionName);
  if (state.pi !== null) q.set("pi", priorToText(state.pi));
  if (state.tau !== null) q.set("tau", priorToText(state.tau));
  if (state.nLo !== d.nLo || state.nHi !== d.nHi) q.set("n", `${state.nLo}..${state.nHi}`);
  if (state.setting !== d.setting) q.set("setting", state.setting);
  if (state.replicates !== d.replicates) q.set("reps", String(state.replicates));
  if (state.curveKind !== d.curveKind || state.lod !== d.lod || state.curveWidth !== null) {
    q.set(
      "curve",
      state.curveKind === "step"
        ? `step:${state.lod}`
        : `logistic:${state.lod},${state.curveWidth}`,
    );
  }
  if (state.tailFraction !== d.tailFraction) q.set("tail", String(state.tailFraction));
  if (state.tailCt !== d.tailCt) q.set("tailct", String(state.tailCt));
  if (state.weibullShape !== d.weibullShape || state.weibullScale !== d.weibullScale) {
    q.set("weibull", `${state.weibullShape},${state.weibullScale}`);
  }
  if (state.draws !== d.draws) q.set("draws", String(state.draws));
  if (state.minSensitivity !== null) q.set("minsens", String(state.minSensitivity));
  if (state.minPassRate !== d.minPassRate) {
    q.set("minrate", state.minPassRate === null ? "off" : String(state.minPassRate));
  }
  if (state.objective !== d.objective) q.set("objective", state.objective);
  if (state.fdaThreshold !== d.fdaThreshold) q.set("fda", String(state.fdaThreshold));
  if (state.seed !== null) q.set("seed", String(state.seed));
  return q.toString();
}

/** Parse a query string produced by stateToQuery; unknown keys are ignored. */
export function stateFromQuery(query: string): AdvisorState {
  const q = new URLSearchParams(query);
  const s = defaultState();
  // scenario selection: explicit priors replace the default catalog names
  if (q.has("pi") || q.has("tau")) {
    s.prevalenceName = null;
    s.transmissionName = null;
  }
  if (q.has("prev")) s.prevalenceName = q.get("prev");
  if (q.has("trans")) s.transmissionName = q.get("trans");
  if (q.has("pi")) s.pi = priorFromText(q.get("pi")!);
  if (q.has("tau")) s.tau = priorFromText(q.get("tau")!);
  const n = q.get("n");
  if (n !== null) {
    const m = /^(\d+)\.\.(\d+)$/.exec(n);
    if (!m) throw new Error(`bad pool-size range: ${n}`);
    s.nLo = Number(m[1]);
    s.nHi = Number(m[2]);
  }
  const setting = q.get("setting");
  if (setting !== null) {
    if (!SETTINGS.includes(setting as SettingKind)) {
      throw new Error(`unknown setting: ${setting}`);
    }
    s.setting = setting as SettingKind;
  }
  if (q.has("reps")) s.replicates = numOrThrow(q.get("reps")!);
  const curve = q.get("curve");
  if (curve !== null) {
    const sep = curve.indexOf(":");
    const kind = curve.slice(0, sep);
    const rest = curve.slice(sep + 1);
    if (kind === "step") {
      s.curveKind = "step";
      s.lod = numOrThrow(rest);
      s.curveWidth = null;
    } else if (kind === "logistic") {
      const parts = rest.split(",");
      if (parts.length !== 2) throw new Error(`bad curve: ${curve}`);
      s.curveKind = "logistic";
      s.lod = numOrThrow(parts[0]!);
      s.curveWidth = numOrThrow(parts[1]!);
    } else {
      throw new Error(`unknown curve: ${curve}`);
    }
  }
  if (q.has("tail")) s.tailFraction = numOrThrow(q.get("tail")!);
  if (q.has("tailct")) s.tailCt = numOrThrow(q.get("tailct")!);
  const weibull = q.get("weibull");
  if (weibull !== null) {
    const parts = weibull.split(",");
    if (parts.length !== 2) throw new Error(`bad weibull: ${weibull}`);
    s.weibullShape = numOrThrow(parts[0]!);
    s.weibullScale = numOrThrow(parts[1]!);
  }
  if (q.has("draws")) s.draws = numOrThrow(q.get("draws")!);
  if (q.has("minsens")) s.minSensitivity = numOrThrow(q.get("minsens")!);
  const minrate = q.get("minrate");
  if (minrate !== null) s.minPassRate = minrate === "off" ? null : numOrThrow(minrate);
  const objective = q.get("objective");
  if (objective !== null) {
    if (!OBJECTIVES.includes(objective as Objective)) {
      throw new Error(`unknown objective: ${objective}`);
    }
    s.objective = objective as Objective;
  }
  if (q.has("fda")) s.fdaThreshold = numOrThrow(q.get("fda")!);
  if (q.has("seed")) s.seed = numOrThrow(q.get("seed")!);
  return s;
}
