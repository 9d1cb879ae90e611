"""Scenario catalog, prior-uncertainty simulation, and pool-size choice.

A scenario pairs a community-prevalence prior with a per-contact transmission
prior.  The built-in catalog vendors twelve published settings: six state-level
prevalence estimates (Beta priors fitted from covidestim.org confidence
intervals) and six secondary-attack-rate estimates from the contact-tracing
literature (Madewell et al 2020; Spielberger et al 2021; Koh et al 2020;
Curmei et al 2020).

Simulation settings control which of the two parameters is resampled per
replicate: ``fixed`` (neither — zero-width bands), ``tau_graph``,
``pi_graph``, or ``all_graph``.  Each replicate draws parameters from a
stream derived from (seed, replicate index), evaluates the full metric
sweep, and the per-n 2.5/50/97.5 percent quantiles across replicates form
the credible bands; point curves evaluate at the prior means.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .ct import CtPopulation, DetectionCurve
from .errors import ParameterError
from .infection import ModelKind, PoolParams
from .metrics import DEFAULT_SENS_DRAWS, MAX_POOL_SIZE, evaluate_pool
from .priors import BetaParams, PriorSpec, beta_ppf
from .streams import DEFAULT_SEED, NS_REPLICATE, derive_rng

__all__ = [
    "FDA_SENSITIVITY_THRESHOLD",
    "DEFAULT_REPLICATES",
    "SETTING_KINDS",
    "METRIC_NAMES",
    "CatalogEntry",
    "Scenario",
    "SimulationSetting",
    "MetricBand",
    "ScenarioResult",
    "Constraints",
    "Recommendation",
    "PREVALENCE_CATALOG",
    "TRANSMISSION_CATALOG",
    "builtin_catalog",
    "catalog_lookup",
    "scenario_from_catalog",
    "scenario_from_json",
    "scenario_to_json",
    "parse_setting",
    "run_setting",
    "fda_pass_rate",
    "recommend_pool_size",
    "result_to_csv",
    "result_to_json",
]

FDA_SENSITIVITY_THRESHOLD = 0.85   # minimum pooled-test sensitivity for clearance
DEFAULT_REPLICATES = 100
SETTING_KINDS = ("fixed", "tau_graph", "pi_graph", "all_graph")
METRIC_NAMES = (
    "sensitivity", "relative_sensitivity", "tests_per_sample", "missed_per_sample",
)


@dataclass(frozen=True)
class CatalogEntry:
    """One vendored prior: a named setting for either prevalence or SAR.

    ``display_ci`` is the interval as published alongside the fitted Beta;
    the two are close but not exactly consistent in every row, so
    :meth:`effective_ci` recomputes the exact 95% equal-tailed interval of
    the vendored Beta for integrity checks and UI display.
    """

    name: str
    parameter: str                    # "pi" | "tau"
    stated_mean: float
    display_ci: tuple[float, float]
    beta: BetaParams
    citation: str

    def __post_init__(self):
        if self.parameter not in ("pi", "tau"):
            raise ParameterError("parameter must be 'pi' or 'tau'")

    def prior(self) -> PriorSpec:
        return PriorSpec.from_beta(self.beta)

    def effective_ci(self) -> tuple[float, float]:
        return (beta_ppf(self.beta, 0.025), beta_ppf(self.beta, 0.975))


PREVALENCE_CATALOG: tuple[CatalogEntry, ...] = (
    CatalogEntry("Georgia, July 2020", "pi", 0.013, (0.007, 0.020),
                 BetaParams(16.67, 1282.88), "covidestim.org"),
    CatalogEntry("Maine, October 2020", "pi", 0.002, (0.0007, 0.003),
                 BetaParams(9.94, 6561.33), "covidestim.org"),
    CatalogEntry("Iowa, November 2020", "pi", 0.034, (0.020, 0.052),
                 BetaParams(16.99, 477.12), "covidestim.org"),
    CatalogEntry("Alabama, January 2021", "pi", 0.054, (0.030, 0.084),
                 BetaParams(14.38, 251.01), "covidestim.org"),
    CatalogEntry("Oregon, April 2021", "pi", 0.005, (0.002, 0.007),
                 BetaParams(13.06, 2836.41), "covidestim.org"),
    CatalogEntry("Idaho, May 2021", "pi", 0.004, (0.001, 0.007),
                 BetaParams(5.77, 1543.33), "covidestim.org"),
)

TRANSMISSION_CATALOG: tuple[CatalogEntry, ...] = (
    CatalogEntry("Child Index Case", "tau", 0.1340, (0.057, 0.211),
                 BetaParams(8.38, 59.43), "Spielberger et al 2021"),
    CatalogEntry("Healthcare Setting", "tau", 0.007, (0.004, 0.010),
                 BetaParams(8.3, 359.61), "Koh et al 2020"),
    CatalogEntry("Household (Spouses)", "tau", 0.378, (0.258, 0.505),
                 BetaParams(21.78, 35.92), "Madewell et al 2020"),
    CatalogEntry("Household (Asymptomatic Index Case)", "tau", 0.007, (0.0, 0.049),
                 BetaParams(0.74, 62.23), "Madewell et al 2020"),
    CatalogEntry("Household (Symptomatic Index Case)", "tau", 0.180, (0.142, 0.221),
                 BetaParams(64.95, 296.26), "Madewell et al 2020"),
    CatalogEntry("Household (General)", "tau", 0.30, (0.0, 0.67),
                 BetaParams(0.45, 2.37), "Curmei et al 2020"),
)


def builtin_catalog() -> tuple[CatalogEntry, ...]:
    return PREVALENCE_CATALOG + TRANSMISSION_CATALOG


def catalog_lookup(name: str) -> CatalogEntry:
    for entry in builtin_catalog():
        if entry.name == name:
            return entry
    raise ParameterError(f"no catalog entry named {name!r}")


@dataclass(frozen=True)
class Scenario:
    """A (prevalence prior, transmission prior) pair under one label."""

    name: str
    pi: PriorSpec
    tau: PriorSpec
    citation: str = ""


def scenario_from_catalog(prevalence_name: str, transmission_name: str) -> Scenario:
    pi_entry = catalog_lookup(prevalence_name)
    tau_entry = catalog_lookup(transmission_name)
    if pi_entry.parameter != "pi":
        raise ParameterError(f"{prevalence_name!r} is not a prevalence entry")
    if tau_entry.parameter != "tau":
        raise ParameterError(f"{transmission_name!r} is not a transmission entry")
    return Scenario(
        name=f"{prevalence_name} × {transmission_name}",
        pi=pi_entry.prior(),
        tau=tau_entry.prior(),
        citation=f"{pi_entry.citation}; {tau_entry.citation}",
    )


def scenario_from_json(obj) -> Scenario:
    try:
        return Scenario(
            name=str(obj["name"]),
            pi=PriorSpec.from_json(obj["pi"]),
            tau=PriorSpec.from_json(obj["tau"]),
            citation=str(obj.get("citation", "")),
        )
    except KeyError as exc:
        raise ParameterError(f"scenario document missing key {exc}") from None


def scenario_to_json(scenario: Scenario) -> dict:
    out = {"name": scenario.name, "pi": scenario.pi.to_json(), "tau": scenario.tau.to_json()}
    if scenario.citation:
        out["citation"] = scenario.citation
    return out


@dataclass(frozen=True)
class SimulationSetting:
    """Which parameters are resampled per replicate, and how many replicates."""

    kind: str
    replicates: int = DEFAULT_REPLICATES
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.kind not in SETTING_KINDS:
            raise ParameterError(f"setting must be one of {SETTING_KINDS}, got {self.kind!r}")
        if self.replicates < 1:
            raise ParameterError("replicates must be >= 1")

    @property
    def samples_pi(self) -> bool:
        return self.kind in ("pi_graph", "all_graph")

    @property
    def samples_tau(self) -> bool:
        return self.kind in ("tau_graph", "all_graph")


def parse_setting(text: str) -> str:
    """Normalize a setting name: 'TauGraph', 'tau-graph', 'tau_graph' all work."""
    t = text.strip().lower().replace("-", "_").replace(" ", "_")
    aliases = {"taugraph": "tau_graph", "pigraph": "pi_graph", "allgraph": "all_graph"}
    t = aliases.get(t, t)
    if t not in SETTING_KINDS:
        raise ParameterError(f"unknown setting {text!r}; use one of {SETTING_KINDS}")
    return t


@dataclass(eq=False)
class MetricBand:
    """Per-n curves: at-mean point, and 2.5/50/97.5% quantiles over replicates."""

    point: np.ndarray
    lo: np.ndarray
    median: np.ndarray
    hi: np.ndarray


@dataclass(eq=False)
class ScenarioResult:
    scenario: Scenario
    setting: SimulationSetting
    ns: np.ndarray
    bands: dict[str, MetricBand]
    sensitivity_draws: np.ndarray      # (replicates, len(ns))
    fda_pass_rate: np.ndarray          # at FDA_SENSITIVITY_THRESHOLD


def _replicate_params(scenario: Scenario, setting: SimulationSetting, b: int) -> tuple[float, float]:
    # π is drawn before τ from the replicate's stream; non-sampled parameters
    # sit at their prior means
    rng = derive_rng(setting.seed, NS_REPLICATE, b)
    pi = float(scenario.pi.sample(rng)) if setting.samples_pi else scenario.pi.mean
    tau = float(scenario.tau.sample(rng)) if setting.samples_tau else scenario.tau.mean
    return pi, tau


def run_setting(
    scenario: Scenario,
    setting: SimulationSetting,
    n_lo: int = 1,
    n_hi: int = 30,
    pop: CtPopulation | None = None,
    curve: DetectionCurve | None = None,
    draws: int = DEFAULT_SENS_DRAWS,
    *,
    perfect_test: bool = False,
    threads: int = 1,
) -> ScenarioResult:
    """Credible-band metric curves for a scenario under one setting.

    Replicates are keyed by index off the master seed, so results are
    identical for any execution order or thread count, and the per-k
    sensitivity table is shared across all replicates via memoization.
    """
    if not (1 <= n_lo <= n_hi <= MAX_POOL_SIZE):
        raise ParameterError(
            f"pool-size range must satisfy 1 <= lo <= hi <= {MAX_POOL_SIZE}"
        )
    pop = pop if pop is not None else CtPopulation()
    curve = curve if curve is not None else DetectionCurve.step(35.0)
    ns = np.arange(n_lo, n_hi + 1)
    kind = ModelKind.correlated()
    B = setting.replicates

    def metric_curve(pi: float, tau: float) -> dict[str, np.ndarray]:
        vals = {m: np.empty(len(ns)) for m in METRIC_NAMES}
        for i, n in enumerate(ns):
            row = evaluate_pool(PoolParams(int(n), pi, tau), kind, pop, curve,
                                draws, setting.seed, perfect_test=perfect_test)
            vals["sensitivity"][i] = row.metrics.sensitivity
            vals["relative_sensitivity"][i] = row.metrics.relative_sensitivity
            vals["tests_per_sample"][i] = row.metrics.tests_per_sample
            vals["missed_per_sample"][i] = row.metrics.missed_per_sample
        return vals

    point = metric_curve(scenario.pi.mean, scenario.tau.mean)

    params = [_replicate_params(scenario, setting, b) for b in range(B)]
    if setting.kind == "fixed":
        # no parameter randomness: every replicate repeats the at-mean curve
        rep_curves = [point] * B
    elif threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            rep_curves = list(ex.map(lambda pt: metric_curve(*pt), params))
    else:
        rep_curves = [metric_curve(*pt) for pt in params]

    bands: dict[str, MetricBand] = {}
    for m in METRIC_NAMES:
        draws_m = np.stack([c[m] for c in rep_curves])          # (B, len(ns))
        lo, med, hi = np.quantile(draws_m, [0.025, 0.5, 0.975], axis=0)
        bands[m] = MetricBand(point=point[m], lo=lo, median=med, hi=hi)

    sens_draws = np.stack([c["sensitivity"] for c in rep_curves])
    return ScenarioResult(
        scenario=scenario,
        setting=setting,
        ns=ns,
        bands=bands,
        sensitivity_draws=sens_draws,
        fda_pass_rate=np.mean(sens_draws >= FDA_SENSITIVITY_THRESHOLD, axis=0),
    )


def fda_pass_rate(result: ScenarioResult, threshold: float = FDA_SENSITIVITY_THRESHOLD) -> np.ndarray:
    """Per-n fraction of replicate sensitivities at or above the threshold."""
    if not (0.0 < threshold < 1.0):
        raise ParameterError(f"threshold must lie in (0, 1), got {threshold}")
    return np.mean(result.sensitivity_draws >= threshold, axis=0)


@dataclass(frozen=True)
class Constraints:
    min_sensitivity: float | None = None    # on the at-mean point estimate
    min_pass_rate: float | None = None      # on the FDA pass rate


@dataclass(eq=False)
class Recommendation:
    n: int | None
    objective: str
    constraints: Constraints
    binding_constraint: str | None
    feasible_ns: tuple[int, ...]
    result: ScenarioResult


def recommend_pool_size(
    scenario: Scenario,
    setting: SimulationSetting,
    n_lo: int = 1,
    n_hi: int = 30,
    constraints: Constraints = Constraints(),
    objective: str = "min_tests",
    pop: CtPopulation | None = None,
    curve: DetectionCurve | None = None,
    draws: int = DEFAULT_SENS_DRAWS,
    *,
    result: ScenarioResult | None = None,
    perfect_test: bool = False,
    threads: int = 1,
) -> Recommendation:
    """Pick the pool size minimizing tests per sample among feasible sizes.

    ``min_tests`` and ``max_savings`` name the same optimum (savings are
    1 − tests per sample); ties break toward the smaller pool, which is
    also the easier one to handle in the lab.  Infeasibility is reported as
    n=None plus the constraint (or combination) that excluded every size.
    """
    if objective not in ("min_tests", "max_savings"):
        raise ParameterError("objective must be 'min_tests' or 'max_savings'")
    if result is None:
        result = run_setting(scenario, setting, n_lo, n_hi, pop, curve, draws,
                             perfect_test=perfect_test, threads=threads)

    sens_ok = np.ones(len(result.ns), dtype=bool)
    rate_ok = np.ones(len(result.ns), dtype=bool)
    if constraints.min_sensitivity is not None:
        sens_ok = result.bands["sensitivity"].point >= constraints.min_sensitivity
    if constraints.min_pass_rate is not None:
        rate_ok = result.fda_pass_rate >= constraints.min_pass_rate
    feasible = sens_ok & rate_ok
    feasible_ns = tuple(int(n) for n in result.ns[feasible])

    if not feasible_ns:
        if not sens_ok.any() and not rate_ok.any():
            binding = "min_sensitivity+min_pass_rate"
        elif not sens_ok.any():
            binding = "min_sensitivity"
        elif not rate_ok.any():
            binding = "min_pass_rate"
        else:
            binding = "min_sensitivity+min_pass_rate"
        return Recommendation(None, objective, constraints, binding, (), result)

    eta = result.bands["tests_per_sample"].point[feasible]
    best = feasible_ns[int(np.argmin(eta))]    # first minimum → smallest n
    return Recommendation(best, objective, constraints, None, feasible_ns, result)


def result_to_csv(result: ScenarioResult) -> str:
    """Long-format export: setting,scenario,n,metric,point,lo,hi."""
    lines = ["setting,scenario,n,metric,point,lo,hi"]
    name = result.scenario.name.replace(",", ";")
    for i, n in enumerate(result.ns):
        for m in METRIC_NAMES:
            b = result.bands[m]
            lines.append(
                f"{result.setting.kind},{name},{int(n)},{m},"
                f"{float(b.point[i])!r},{float(b.lo[i])!r},{float(b.hi[i])!r}"
            )
    return "\n".join(lines) + "\n"


def result_to_json(result: ScenarioResult) -> dict:
    return {
        "scenario": scenario_to_json(result.scenario),
        "setting": result.setting.kind,
        "replicates": result.setting.replicates,
        "seed": result.setting.seed,
        "n": [int(n) for n in result.ns],
        "metrics": {
            m: {
                "point": result.bands[m].point.tolist(),
                "lo": result.bands[m].lo.tolist(),
                "median": result.bands[m].median.tolist(),
                "hi": result.bands[m].hi.tolist(),
            }
            for m in METRIC_NAMES
        },
        "fda_pass_rate": result.fda_pass_rate.tolist(),
    }
