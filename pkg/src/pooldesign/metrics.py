"""Performance metrics for one pooling configuration, and pool-size sweeps.

Four metrics describe a two-stage (pool, then retest positives individually)
procedure against individual testing:

  sensitivity           s   = Σ_k s_k p_k / P[S ≥ 1]
  relative sensitivity  s_r = s / s_individual      (may exceed 1; no clamp)
  tests per sample      η   = 1/n + Σ_k s_k p_k    (1 exactly when n = 1)
  missed per sample         = Σ_k k(1−s_k) p_k / n

where p_k is the infected-count law and s_k the per-k pooled detection
probability.  ``missed_literal`` is a historical variant of the missed-cases
expression — numerator weight (1−p_k) in place of p_k(1−s_k), divided by η —
kept for auditability only; it is not a proportion and is never asserted
against numerically.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .ct import CtPopulation, DetectionCurve, individual_sensitivity, sensitivity_given_k
from .errors import ParameterError
from .infection import CountDistribution, ModelKind, PoolParams, count_distribution
from .streams import DEFAULT_SEED

__all__ = [
    "MetricSet",
    "SweepRow",
    "SWEEP_CSV_COLUMNS",
    "DEFAULT_SENS_DRAWS",
    "NEGLIGIBLE_P",
    "pool_metrics",
    "pool_sensitivities",
    "evaluate_pool",
    "sweep_pool_sizes",
    "rows_to_csv",
    "rows_to_json",
    "percent_fewer_tests",
    "percent_sensitivity_gain",
]

DEFAULT_SENS_DRAWS = 100_000
MAX_POOL_SIZE = 100
NEGLIGIBLE_P = 1e-15   # count probabilities below this skip the s_k draw

SWEEP_CSV_COLUMNS = (
    "model", "n", "pi", "tau", "sensitivity", "relative_sensitivity",
    "tests_per_sample", "missed_per_sample", "p_positive_pool",
)


@dataclass(frozen=True)
class MetricSet:
    sensitivity: float
    relative_sensitivity: float
    tests_per_sample: float
    missed_per_sample: float
    missed_literal: float


@dataclass(frozen=True)
class SweepRow:
    model: str
    n: int
    pi: float
    tau: float
    metrics: MetricSet
    p_positive_pool: float


def pool_metrics(dist: CountDistribution, s_k, s_individual: float) -> MetricSet:
    """Combine a count law with per-k sensitivities into the metric set.

    ``s_k[i]`` is the detection probability given i+1 positives, so the
    sequence has length n.  A singleton pool is individual testing and is
    reported with tests_per_sample = 1 (no confirmatory second stage).
    """
    n = dist.n
    s_k = np.asarray(s_k, dtype=float)
    if s_k.shape != (n,):
        raise ParameterError(f"s_k must have length n={n}")
    if s_individual <= 0.0:
        raise ParameterError("relative sensitivity undefined: s_individual must be > 0")
    p = dist.probs
    p_pos = dist.p_positive
    if p_pos <= 0.0:
        raise ParameterError("sensitivity undefined: pool is never positive")

    ks = np.arange(1, n + 1)
    weighted = float(np.dot(s_k, p[1:]))           # P[test is positive]
    sensitivity = weighted / p_pos
    eta = 1.0 if n == 1 else 1.0 / n + weighted
    missed = float(np.dot(ks * (1.0 - s_k), p[1:])) / n
    literal = float(np.dot(ks * s_k, 1.0 - p[1:])) / eta
    return MetricSet(
        sensitivity=sensitivity,
        relative_sensitivity=sensitivity / s_individual,
        tests_per_sample=eta,
        missed_per_sample=missed,
        missed_literal=literal,
    )


def pool_sensitivities(
    dist: CountDistribution,
    pop: CtPopulation,
    curve: DetectionCurve,
    draws: int = DEFAULT_SENS_DRAWS,
    seed: int = DEFAULT_SEED,
) -> np.ndarray:
    """Per-k sensitivities for this count law; k with negligible mass skipped.

    Skipped entries are returned as 0 and contribute ≤ n·NEGLIGIBLE_P to any
    metric.  Values are memoized underneath, so null and correlated variants
    of the same configuration see identical s_k.
    """
    n = dist.n
    out = np.zeros(n)
    for k in range(1, n + 1):
        if dist.probs[k] > NEGLIGIBLE_P:
            out[k - 1] = sensitivity_given_k(k, n, pop, curve, draws, seed).value
    return out


def evaluate_pool(
    params: PoolParams,
    kind: ModelKind,
    pop: CtPopulation,
    curve: DetectionCurve,
    draws: int = DEFAULT_SENS_DRAWS,
    seed: int = DEFAULT_SEED,
    *,
    perfect_test: bool = False,
) -> SweepRow:
    """Metrics for one (params, model kind) configuration.

    ``perfect_test`` replaces the assay model with an always-detecting one
    (all s_k = 1), isolating the purely combinatorial part of the metrics.
    """
    dist = count_distribution(params, kind)
    if perfect_test:
        s_k = np.ones(params.n)
        s_ind = 1.0
    else:
        s_k = pool_sensitivities(dist, pop, curve, draws, seed)
        s_ind = individual_sensitivity(pop, curve, draws, seed).value
    return SweepRow(
        model=kind.kind,
        n=params.n,
        pi=params.pi,
        tau=params.tau,
        metrics=pool_metrics(dist, s_k, s_ind),
        p_positive_pool=dist.p_positive,
    )


def sweep_pool_sizes(
    n_lo: int,
    n_hi: int,
    pi: float,
    tau: float,
    pop: CtPopulation,
    curve: DetectionCurve,
    kinds: tuple[ModelKind, ...] = (ModelKind.null(), ModelKind.correlated()),
    draws: int = DEFAULT_SENS_DRAWS,
    seed: int = DEFAULT_SEED,
    *,
    threads: int = 1,
) -> list[SweepRow]:
    """One row per (n, kind) over n = n_lo..n_hi inclusive.

    Null rows rerun the count law with the network switched off but keep the
    same per-k sensitivities, isolating the effect of correlation itself.
    """
    if not (1 <= n_lo <= n_hi <= MAX_POOL_SIZE):
        raise ParameterError(
            f"pool-size range must satisfy 1 <= lo <= hi <= {MAX_POOL_SIZE}"
        )
    ns = range(n_lo, n_hi + 1)

    def rows_for(n: int) -> list[SweepRow]:
        return [
            evaluate_pool(PoolParams(n, pi, tau), kind, pop, curve, draws, seed)
            for kind in kinds
        ]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            chunks = list(ex.map(rows_for, ns))
    else:
        chunks = [rows_for(n) for n in ns]
    return [row for chunk in chunks for row in chunk]


def _row_record(row: SweepRow, include_literal: bool) -> dict:
    rec = {
        "model": row.model,
        "n": row.n,
        "pi": row.pi,
        "tau": row.tau,
        "sensitivity": row.metrics.sensitivity,
        "relative_sensitivity": row.metrics.relative_sensitivity,
        "tests_per_sample": row.metrics.tests_per_sample,
        "missed_per_sample": row.metrics.missed_per_sample,
        "p_positive_pool": row.p_positive_pool,
    }
    if include_literal:
        rec["missed_literal"] = row.metrics.missed_literal
    return rec


def rows_to_csv(rows, *, include_literal: bool = False) -> str:
    """CSV with repr-formatted floats so values round-trip exactly."""
    cols = SWEEP_CSV_COLUMNS + (("missed_literal",) if include_literal else ())
    lines = [",".join(cols)]
    for row in rows:
        rec = _row_record(row, include_literal)
        lines.append(",".join(
            str(rec[c]) if c in ("model", "n") else repr(float(rec[c])) for c in cols
        ))
    return "\n".join(lines) + "\n"


def rows_to_json(rows, *, include_literal: bool = False) -> list[dict]:
    return [_row_record(row, include_literal) for row in rows]


def percent_fewer_tests(tests_per_sample: float) -> float:
    """Reduction in tests vs individual testing, in percent."""
    return 100.0 * (1.0 - tests_per_sample)


def percent_sensitivity_gain(s_model: float, s_null: float) -> float:
    """Gain of the network-aware sensitivity over the no-network value, %."""
    if s_null <= 0.0:
        raise ParameterError("baseline sensitivity must be > 0")
    return 100.0 * (s_model - s_null) / s_null
