import math

import numpy as np
import pytest

from pooldesign import (
    MetricSet,
    ModelKind,
    ParameterError,
    PoolParams,
    SweepRow,
    count_distribution,
    evaluate_pool,
    marginal_infection_prob,
    percent_fewer_tests,
    percent_sensitivity_gain,
    rows_to_csv,
    rows_to_json,
    sweep_pool_sizes,
)
from pooldesign.metrics import NEGLIGIBLE_P, pool_metrics, pool_sensitivities
from pooldesign.ct import clear_sensitivity_cache

FAST_DRAWS = 4000

SWEEP_HEADER = (
    "model,n,pi,tau,sensitivity,relative_sensitivity,"
    "tests_per_sample,missed_per_sample,p_positive_pool"
)


# --- metric identities on controlled s_k --------------------------------------


def test_perfect_test_metrics(default_pop, step35):
    params = PoolParams(5, 0.002, 0.18)
    row = evaluate_pool(params, ModelKind.correlated(), default_pop, step35, perfect_test=True)
    m = row.metrics
    assert m.sensitivity == pytest.approx(1.0, abs=1e-12)
    assert m.relative_sensitivity == pytest.approx(1.0, abs=1e-12)
    assert m.missed_per_sample == 0.0
    assert m.tests_per_sample == pytest.approx(0.20996007992003196, abs=1e-12)
    assert m.tests_per_sample == pytest.approx(
        1.0 / 5.0 + 1.0 - (1.0 - 0.002) ** 5, abs=1e-15
    )


def test_perfect_test_eta_model_free(default_pop, step35):
    # pool positivity is decided by seeding alone, so a perfect assay gives the
    # same workload under either count law
    params = PoolParams(12, 0.04, 0.6)
    null = evaluate_pool(params, ModelKind.null(), default_pop, step35, perfect_test=True)
    corr = evaluate_pool(params, ModelKind.correlated(), default_pop, step35, perfect_test=True)
    assert null.metrics.tests_per_sample == pytest.approx(
        corr.metrics.tests_per_sample, abs=1e-12
    )


def test_always_negative_assay():
    params = PoolParams(5, 0.1, 0.3)
    dist = count_distribution(params, ModelKind.correlated())
    m = pool_metrics(dist, np.zeros(5), 0.75)
    assert m.sensitivity == 0.0
    assert m.relative_sensitivity == 0.0
    assert m.tests_per_sample == 1.0 / 5.0
    assert m.missed_per_sample == pytest.approx(marginal_infection_prob(params), abs=1e-12)


def test_sensitivity_is_convex_combination():
    params = PoolParams(6, 0.08, 0.4)
    dist = count_distribution(params, ModelKind.correlated())
    s_k = np.array([0.4, 0.55, 0.7, 0.8, 0.9, 0.97])
    m = pool_metrics(dist, s_k, 0.75)
    assert s_k.min() - 1e-12 <= m.sensitivity <= s_k.max() + 1e-12


def test_eta_bounds():
    params = PoolParams(8, 0.12, 0.5)
    dist = count_distribution(params, ModelKind.correlated())
    s_k = np.linspace(0.3, 0.99, 8)
    m = pool_metrics(dist, s_k, 0.75)
    assert 1.0 / 8.0 - 1e-15 <= m.tests_per_sample
    assert m.tests_per_sample <= 1.0 / 8.0 + dist.p_positive + 1e-15


def test_missed_zero_iff_perfect_and_directional():
    params = PoolParams(4, 0.1, 0.3)
    dist = count_distribution(params, ModelKind.correlated())
    perfect = pool_metrics(dist, np.ones(4), 1.0)
    assert perfect.missed_per_sample == 0.0
    for idx in range(4):
        s_k = np.ones(4)
        s_k[idx] = 0.9
        degraded = pool_metrics(dist, s_k, 1.0)
        assert degraded.missed_per_sample > 0.0
        # each missed infection costs k/n in proportion terms
        want = (idx + 1) * 0.1 * dist.probs[idx + 1] / 4.0
        assert degraded.missed_per_sample == pytest.approx(want, abs=1e-15)


def test_pool_metrics_validation():
    dist = count_distribution(PoolParams(5, 0.1, 0.3), ModelKind.correlated())
    with pytest.raises(ParameterError):
        pool_metrics(dist, np.ones(4), 0.75)
    with pytest.raises(ParameterError):
        pool_metrics(dist, np.ones(5), 0.0)
    never_positive = count_distribution(PoolParams(5, 0.0, 0.3), ModelKind.correlated())
    with pytest.raises(ParameterError):
        pool_metrics(never_positive, np.ones(5), 0.75)


def test_pool_sensitivities_skips_negligible_counts(default_pop, step35):
    dist = count_distribution(PoolParams(5, 1e-9, 0.0), ModelKind.correlated())
    s_k = pool_sensitivities(dist, default_pop, step35, draws=FAST_DRAWS)
    assert s_k[0] > 0.0
    assert s_k[-1] == 0.0
    assert dist.probs[-1] <= NEGLIGIBLE_P


# --- single-configuration evaluation ------------------------------------------


def test_singleton_pool_is_individual_testing(default_pop, step35):
    row = evaluate_pool(PoolParams(1, 0.1, 0.3), ModelKind.correlated(),
                        default_pop, step35, draws=FAST_DRAWS)
    m = row.metrics
    assert m.tests_per_sample == 1.0
    assert m.relative_sensitivity == pytest.approx(1.0, rel=1e-12)
    assert m.missed_per_sample == pytest.approx(0.1 * (1.0 - m.sensitivity), rel=1e-9)


def test_p_positive_pool_depends_only_on_seeding(default_pop, step35):
    params = PoolParams(10, 0.05, 0.7)
    null = evaluate_pool(params, ModelKind.null(), default_pop, step35, draws=FAST_DRAWS)
    corr = evaluate_pool(params, ModelKind.correlated(), default_pop, step35, draws=FAST_DRAWS)
    assert null.p_positive_pool == pytest.approx(corr.p_positive_pool, abs=1e-12)
    assert corr.p_positive_pool == pytest.approx(1.0 - 0.95**10, abs=1e-12)


def test_relative_sensitivity_can_exceed_one(default_pop, step35):
    # saturated transmission in a pair: a positive pool holds two infections,
    # and their combined template beats one individual draw
    row = evaluate_pool(PoolParams(2, 0.3, 1.0), ModelKind.correlated(),
                        default_pop, step35, draws=50_000)
    assert row.metrics.relative_sensitivity > 1.0


# --- sweeps -------------------------------------------------------------------


@pytest.fixture(scope="module")
def alabama_sweep(default_pop, step35):
    return sweep_pool_sizes(1, 30, 0.054, 0.18, default_pop, step35, draws=FAST_DRAWS)


def test_sweep_shape_and_order(alabama_sweep):
    assert len(alabama_sweep) == 60
    for i, row in enumerate(alabama_sweep):
        assert isinstance(row, SweepRow)
        assert row.n == i // 2 + 1
        assert row.model == ("null" if i % 2 == 0 else "correlated")
        assert row.pi == 0.054
        assert row.tau == 0.18


def test_sweep_correlated_dominates_null(alabama_sweep):
    for null, corr in zip(alabama_sweep[::2], alabama_sweep[1::2]):
        assert corr.metrics.sensitivity >= null.metrics.sensitivity - 1e-12
        assert corr.metrics.tests_per_sample >= null.metrics.tests_per_sample - 1e-12


def test_sweep_zero_tau_collapses_models(default_pop, step35):
    rows = sweep_pool_sizes(2, 12, 0.05, 0.0, default_pop, step35, draws=FAST_DRAWS)
    for null, corr in zip(rows[::2], rows[1::2]):
        assert null.metrics == corr.metrics
        assert null.p_positive_pool == corr.p_positive_pool


def test_sensitivity_monotone_in_tau(default_pop, step35):
    taus = np.linspace(0.0, 1.0, 11)
    rows = [
        evaluate_pool(PoolParams(10, 0.01, t), ModelKind.correlated(),
                      default_pop, step35, draws=FAST_DRAWS)
        for t in taus
    ]
    s = [r.metrics.sensitivity for r in rows]
    eta = [r.metrics.tests_per_sample for r in rows]
    assert np.all(np.diff(s) >= -1e-12)
    assert np.all(np.diff(eta) >= -1e-12)


def test_sweep_range_validation(default_pop, step35):
    for lo, hi in ((0, 5), (5, 3), (1, 101)):
        with pytest.raises(ParameterError):
            sweep_pool_sizes(lo, hi, 0.05, 0.1, default_pop, step35, draws=FAST_DRAWS)


def test_sweep_thread_invariant(default_pop, step35):
    clear_sensitivity_cache()
    a = sweep_pool_sizes(2, 6, 0.05, 0.2, default_pop, step35, draws=FAST_DRAWS, threads=1)
    clear_sensitivity_cache()
    b = sweep_pool_sizes(2, 6, 0.05, 0.2, default_pop, step35, draws=FAST_DRAWS, threads=4)
    assert a == b


# --- serialization ------------------------------------------------------------


def test_csv_header_and_round_trip(alabama_sweep):
    text = rows_to_csv(alabama_sweep[:6])
    lines = text.strip().split("\n")
    assert lines[0] == SWEEP_HEADER
    assert len(lines) == 7
    for line, row in zip(lines[1:], alabama_sweep[:6]):
        fields = line.split(",")
        assert fields[0] == row.model
        assert int(fields[1]) == row.n
        assert float(fields[4]) == row.metrics.sensitivity
        assert float(fields[6]) == row.metrics.tests_per_sample
        assert float(fields[8]) == row.p_positive_pool


def test_csv_literal_column(alabama_sweep):
    text = rows_to_csv(alabama_sweep[:2], include_literal=True)
    lines = text.strip().split("\n")
    assert lines[0] == SWEEP_HEADER + ",missed_literal"
    assert float(lines[1].split(",")[-1]) == alabama_sweep[0].metrics.missed_literal
    assert alabama_sweep[0].metrics.missed_literal >= 0.0


def test_json_records(alabama_sweep):
    recs = rows_to_json(alabama_sweep[:2])
    assert [r["model"] for r in recs] == ["null", "correlated"]
    assert set(recs[0]) == set(SWEEP_HEADER.split(","))
    extended = rows_to_json(alabama_sweep[:1], include_literal=True)
    assert "missed_literal" in extended[0]


def test_percent_helpers():
    assert percent_fewer_tests(0.28) == pytest.approx(72.0, abs=1e-12)
    assert percent_fewer_tests(1.0) == 0.0
    assert percent_sensitivity_gain(0.62, 0.5) == pytest.approx(24.0, abs=1e-12)
    with pytest.raises(ParameterError):
        percent_sensitivity_gain(0.5, 0.0)


def test_metric_set_is_plain_record():
    m = MetricSet(0.5, 0.6, 0.3, 0.01, 0.02)
    assert m == MetricSet(0.5, 0.6, 0.3, 0.01, 0.02)
