"""Dorfman pooled-testing design under correlated infections.

Pools are drawn from social units where infection spreads, so positives
cluster: the count law, Ct-dilution physics, and performance metrics here
quantify how that clustering changes the pooled-testing trade-off, and the
scenario engine turns published prevalence/transmission priors into
credible bands and a constrained pool-size recommendation.
"""

from .errors import FitConvergenceError, InternalConsistencyError, ParameterError
from .streams import (
    DEFAULT_SEED,
    NS_GENERIC,
    NS_REPLICATE,
    NS_SENSITIVITY,
    NS_SIMULATION,
    SEED_ENV_VAR,
    default_seed,
    derive_rng,
    make_rng,
)
from .priors import (
    ALT_CT_WEIBULL,
    DEFAULT_CT_WEIBULL,
    BetaParams,
    PriorSpec,
    WeibullParams,
    beta_cdf,
    beta_ppf,
    calibrate_ct_shift,
    fit_beta_from_quantiles,
    sample_prior,
    weibull_mean,
    weibull_quantile,
)
from .infection import (
    CountDistribution,
    ModelKind,
    PoolParams,
    TauRegion,
    count_distribution,
    expected_positives,
    marginal_infection_prob,
    min_tau_for_increment,
    pair_correlation,
    prob_multiple_given_positive,
    robust_tau_region,
    simulate_counts,
)
from .ct import (
    CtPopulation,
    DetectionCurve,
    DilutionSample,
    SensitivityEstimate,
    detection_prob,
    dilution_ct,
    hitchhiker_exceed_individual_approx,
    hitchhiker_exceed_individual_prob,
    hitchhiker_exceed_mean_prob,
    individual_sensitivity,
    parse_curve,
    pooled_lod,
    sensitivity_given_k,
)
from .metrics import (
    MetricSet,
    SweepRow,
    evaluate_pool,
    percent_fewer_tests,
    percent_sensitivity_gain,
    pool_metrics,
    rows_to_csv,
    rows_to_json,
    sweep_pool_sizes,
)
from .scenarios import (
    FDA_SENSITIVITY_THRESHOLD,
    CatalogEntry,
    Constraints,
    MetricBand,
    Recommendation,
    Scenario,
    ScenarioResult,
    SimulationSetting,
    builtin_catalog,
    catalog_lookup,
    fda_pass_rate,
    recommend_pool_size,
    result_to_csv,
    result_to_json,
    run_setting,
    scenario_from_catalog,
    scenario_from_json,
    scenario_to_json,
)

__version__ = "0.1.0"
