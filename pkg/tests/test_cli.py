import json

import pytest

from pooldesign.cli import main

FAST = ["--draws", "2000"]


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# --- metrics ------------------------------------------------------------------


def test_metrics_json_payload(capsys):
    code, out, err = run_cli(
        capsys, "metrics", "--n", "5", "--pi", "0.002", "--tau", "0.18",
        "--perfect-test", *FAST)
    assert code == 0
    assert "seed: 1729" in err
    doc = json.loads(out)
    assert doc["model"] == "correlated"
    assert doc["n"] == 5
    assert doc["seed"] == 1729
    assert doc["tests_per_sample"] == pytest.approx(0.20996007992003196, abs=1e-12)
    assert doc["sensitivity"] == pytest.approx(1.0, abs=1e-12)
    assert "missed_literal" not in doc


def test_metrics_null_model_and_literal(capsys):
    code, out, _ = run_cli(
        capsys, "metrics", "--n", "8", "--pi", "0.05", "--tau", "0.3",
        "--model", "null", "--missed-literal", *FAST)
    assert code == 0
    doc = json.loads(out)
    assert doc["model"] == "null"
    assert doc["tau"] == 0.3          # echoed even though the null law ignores it
    assert "missed_literal" in doc


def test_metrics_csv_format(capsys):
    code, out, _ = run_cli(
        capsys, "metrics", "--n", "5", "--pi", "0.05", "--tau", "0.3",
        "--format", "csv", *FAST)
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == ("model,n,pi,tau,sensitivity,relative_sensitivity,"
                        "tests_per_sample,missed_per_sample,p_positive_pool")
    assert len(lines) == 2
    assert lines[1].startswith("correlated,5,")


def test_metrics_beta_prior_uses_mean(capsys):
    code, out, _ = run_cli(
        capsys, "metrics", "--n", "4", "--pi", "beta:14.38,251.01",
        "--tau", "0.18", "--perfect-test", *FAST)
    assert code == 0
    doc = json.loads(out)
    assert doc["pi"] == pytest.approx(14.38 / (14.38 + 251.01), abs=1e-12)


# --- sweep --------------------------------------------------------------------


def test_sweep_json_and_csv_agree(capsys):
    args = ["sweep", "--n", "2..5", "--pi", "0.054", "--tau", "0.18", *FAST]
    code, out_json, _ = run_cli(capsys, *args)
    assert code == 0
    doc = json.loads(out_json)
    assert doc["seed"] == 1729
    assert len(doc["rows"]) == 8
    assert [r["n"] for r in doc["rows"]] == [2, 2, 3, 3, 4, 4, 5, 5]

    code, out_csv, _ = run_cli(capsys, *args, "--format", "csv")
    assert code == 0
    lines = out_csv.strip().split("\n")
    assert len(lines) == 9
    for line, rec in zip(lines[1:], doc["rows"]):
        fields = line.split(",")
        assert fields[0] == rec["model"]
        assert float(fields[4]) == rec["sensitivity"]


def test_sweep_deterministic_bytes(capsys):
    args = ["sweep", "--n", "2..4", "--pi", "0.05", "--tau", "0.2", *FAST]
    _, first, _ = run_cli(capsys, *args)
    _, second, _ = run_cli(capsys, *args)
    assert first == second


def test_sweep_range_error_is_computation_error(capsys):
    code, _, err = run_cli(
        capsys, "sweep", "--n", "1..200", "--pi", "0.05", "--tau", "0.2", *FAST)
    assert code == 1
    assert "error:" in err


# --- seed resolution ----------------------------------------------------------


def test_seed_env_override(capsys, monkeypatch):
    monkeypatch.setenv("POOL_DESIGN_SEED", "777")
    code, out, err = run_cli(
        capsys, "metrics", "--n", "3", "--pi", "0.05", "--tau", "0.2", *FAST)
    assert code == 0
    assert "seed: 777" in err
    assert json.loads(out)["seed"] == 777


def test_seed_flag_beats_env(capsys, monkeypatch):
    monkeypatch.setenv("POOL_DESIGN_SEED", "777")
    code, out, err = run_cli(
        capsys, "metrics", "--n", "3", "--pi", "0.05", "--tau", "0.2",
        "--seed", "42", *FAST)
    assert code == 0
    assert "seed: 42" in err
    assert json.loads(out)["seed"] == 42


# --- simulate -----------------------------------------------------------------


def test_simulate_fixed_custom_priors(capsys):
    code, out, _ = run_cli(
        capsys, "simulate", "--pi", "0.05", "--tau", "0.2",
        "--setting", "fixed", "--reps", "1", "--n", "2..4", *FAST)
    assert code == 0
    doc = json.loads(out)
    assert doc["setting"] == "fixed"
    assert doc["n"] == [2, 3, 4]
    assert doc["scenario"]["name"] == "custom π × custom τ"
    band = doc["metrics"]["sensitivity"]
    assert band["lo"] == band["hi"] == band["point"]


def test_simulate_catalog_names(capsys):
    code, out, _ = run_cli(
        capsys, "simulate", "--pi-name", "Maine, October 2020",
        "--tau-name", "Household (Spouses)",
        "--setting", "fixed", "--reps", "1", "--n", "2..3", *FAST)
    assert code == 0
    doc = json.loads(out)
    assert doc["scenario"]["name"] == "Maine, October 2020 × Household (Spouses)"
    assert "beta" in doc["scenario"]["pi"]


def test_simulate_scenario_file(capsys, tmp_path):
    doc = {
        "name": "file scenario",
        "pi": {"point": 0.03},
        "tau": {"beta": {"alpha": 21.78, "beta": 35.92}},
    }
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run_cli(
        capsys, "simulate", "--scenario", str(path),
        "--setting", "tau-graph", "--reps", "5", "--n", "2..3", *FAST)
    assert code == 0
    parsed = json.loads(out)
    assert parsed["scenario"]["name"] == "file scenario"
    assert parsed["setting"] == "tau_graph"
    assert parsed["replicates"] == 5


def test_simulate_csv_format(capsys):
    code, out, _ = run_cli(
        capsys, "simulate", "--pi", "0.05", "--tau", "0.2",
        "--setting", "fixed", "--reps", "1", "--n", "2..3",
        "--format", "csv", *FAST)
    assert code == 0
    assert out.startswith("setting,scenario,n,metric,point,lo,hi\n")


def test_simulate_requires_priors(capsys):
    code, _, err = run_cli(capsys, "simulate", "--setting", "fixed", *FAST)
    assert code == 1
    assert "give both priors" in err


def test_simulate_bad_reps(capsys):
    code, _, err = run_cli(
        capsys, "simulate", "--pi", "0.05", "--tau", "0.2",
        "--reps", "0", "--n", "2..3", *FAST)
    assert code == 1
    assert "error:" in err


# --- fit-beta -----------------------------------------------------------------


def test_fit_beta_spouses_interval(capsys):
    code, out, _ = run_cli(capsys, "fit-beta", "--lo", "0.258", "--hi", "0.505")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"alpha", "beta", "mean", "lo", "hi", "p_lo", "p_hi"}
    assert doc["alpha"] == pytest.approx(21.78, rel=0.02)
    assert doc["beta"] == pytest.approx(35.92, rel=0.02)
    assert 0.258 < doc["mean"] < 0.505
    assert doc["p_lo"] == 0.025


def test_fit_beta_custom_levels(capsys):
    code, out, _ = run_cli(
        capsys, "fit-beta", "--lo", "0.1", "--hi", "0.3",
        "--p-lo", "0.1", "--p-hi", "0.9")
    assert code == 0
    assert json.loads(out)["p_hi"] == 0.9


def test_fit_beta_bad_interval(capsys):
    code, _, err = run_cli(capsys, "fit-beta", "--lo", "0.5", "--hi", "0.4")
    assert code == 1
    assert "error:" in err


# --- recommend ----------------------------------------------------------------


def test_recommend_perfect_test(capsys):
    code, out, _ = run_cli(
        capsys, "recommend", "--pi", "0.054", "--tau", "0.18",
        "--setting", "fixed", "--reps", "1", "--n", "1..30",
        "--perfect-test", *FAST)
    assert code == 0
    doc = json.loads(out)
    assert doc["n"] == 5
    assert doc["infeasible"] is False
    assert doc["binding_constraint"] is None
    assert doc["result"]["setting"] == "fixed"


def test_recommend_infeasible_still_exit_zero(capsys):
    code, out, _ = run_cli(
        capsys, "recommend", "--pi", "0.05", "--tau", "0.3",
        "--setting", "fixed", "--reps", "1", "--n", "1..6",
        "--min-sensitivity", "1.01", *FAST)
    assert code == 0
    doc = json.loads(out)
    assert doc["n"] is None
    assert doc["infeasible"] is True
    assert doc["binding_constraint"] == "min_sensitivity"
    assert doc["feasible_ns"] == []


def test_recommend_objective_spelling(capsys):
    code, out, _ = run_cli(
        capsys, "recommend", "--pi", "0.054", "--tau", "0.18",
        "--setting", "fixed", "--reps", "1", "--n", "2..8",
        "--objective", "max-savings", "--perfect-test", *FAST)
    assert code == 0
    assert json.loads(out)["objective"] == "max_savings"


# --- catalog ------------------------------------------------------------------


def test_catalog_json(capsys):
    code, out, _ = run_cli(capsys, "catalog")
    assert code == 0
    entries = json.loads(out)["entries"]
    assert len(entries) == 12
    spouses = next(e for e in entries if e["name"] == "Household (Spouses)")
    assert spouses["alpha"] == 21.78
    assert spouses["parameter"] == "tau"
    assert len(spouses["display_ci"]) == 2
    assert len(spouses["effective_ci"]) == 2


def test_catalog_csv(capsys):
    code, out, _ = run_cli(capsys, "catalog", "--format", "csv")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "name,parameter,stated_mean,ci_lo,ci_hi,alpha,beta,citation"
    assert len(lines) == 13
    assert lines[1].startswith('"Georgia, July 2020",pi,')


# --- output files and exit codes ----------------------------------------------


def test_out_writes_file(capsys, tmp_path):
    target = tmp_path / "rows.json"
    code, out, _ = run_cli(
        capsys, "sweep", "--n", "2..3", "--pi", "0.05", "--tau", "0.2",
        "--out", str(target), *FAST)
    assert code == 0
    assert out == ""
    doc = json.loads(target.read_text())
    assert len(doc["rows"]) == 4


def test_usage_errors_exit_two(capsys):
    cases = [
        ["metrics", "--n", "5"],                                   # missing priors
        ["metrics", "--n", "0", "--pi", "0.1", "--tau", "0.1"],    # bad range
        ["metrics", "--n", "5", "--pi", "1.5", "--tau", "0.1"],    # prior out of range
        ["metrics", "--n", "5", "--pi", "beta:1", "--tau", "0.1"],  # malformed prior
        ["sweep", "--n", "5..2", "--pi", "0.1", "--tau", "0.1"],   # inverted range
        ["frobnicate"],                                            # unknown subcommand
        [],                                                        # no subcommand
        ["metrics", "--n", "5", "--pi", "0.1", "--tau", "0.1", "--bogus"],
    ]
    for argv in cases:
        code, _, _ = run_cli(capsys, *argv)
        assert code == 2, argv


def test_help_exits_zero(capsys):
    for sub in ("metrics", "sweep", "simulate", "fit-beta", "recommend",
                "catalog", "serve"):
        code, out, _ = run_cli(capsys, sub, "--help")
        assert code == 0
        assert "--" in out
    code, out, _ = run_cli(capsys, "--help")
    assert code == 0
    assert "pool-design" in out
