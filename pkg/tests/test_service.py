import pytest
from fastapi.testclient import TestClient

from pooldesign import __version__
from pooldesign.service import create_app

FAST = {"draws": 2000}


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app()) as c:
        yield c


# --- read-only endpoints ------------------------------------------------------


def test_health(client):
    r = client.get("/api/health")
    assert r.status_code == 200
    assert r.json() == {"status": "ok", "version": __version__}


def test_catalog(client):
    r = client.get("/api/catalog")
    assert r.status_code == 200
    doc = r.json()
    assert doc["version"] == __version__
    assert len(doc["entries"]) == 12
    spouses = next(e for e in doc["entries"] if e["name"] == "Household (Spouses)")
    assert spouses["beta"] == {"alpha": 21.78, "beta": 35.92}
    assert spouses["parameter"] == "tau"
    assert len(spouses["display_ci"]) == 2
    assert len(spouses["effective_ci"]) == 2
    assert spouses["citation"] == "Madewell et al 2020"


# --- sweep --------------------------------------------------------------------


def test_sweep_minimal(client):
    r = client.post("/api/sweep", json={"pi": {"point": 0.054}, "n_range": [2, 4], **FAST})
    assert r.status_code == 200
    doc = r.json()
    assert doc["seed"] == 1729
    assert doc["version"] == __version__
    assert [row["n"] for row in doc["rows"]] == [2, 2, 3, 3, 4, 4]
    assert doc["config"]["tau_point"] == 0.0
    assert doc["config"]["pi_point"] == 0.054
    assert doc["config"]["draws"] == 2000


def test_sweep_omitted_tau_is_point_zero(client):
    implicit = client.post("/api/sweep",
                           json={"pi": {"point": 0.05}, "n_range": [2, 3], **FAST})
    explicit = client.post("/api/sweep",
                           json={"pi": {"point": 0.05}, "tau": {"point": 0.0},
                                 "n_range": [2, 3], **FAST})
    assert implicit.status_code == explicit.status_code == 200
    assert implicit.content == explicit.content


def test_sweep_beta_prior_resolved_to_mean(client):
    r = client.post("/api/sweep", json={
        "pi": {"beta": {"alpha": 14.38, "beta": 251.01}},
        "tau": {"point": 0.18}, "n_range": [2, 3], **FAST})
    assert r.status_code == 200
    cfg = r.json()["config"]
    assert cfg["pi_point"] == pytest.approx(14.38 / (14.38 + 251.01), abs=1e-12)
    assert cfg["pi"] == {"beta": {"alpha": 14.38, "beta": 251.01}}


def test_sweep_model_filter_and_literal(client):
    r = client.post("/api/sweep", json={
        "pi": {"point": 0.05}, "tau": {"point": 0.2}, "n_range": [2, 4],
        "models": ["correlated"], "include_literal": True, **FAST})
    assert r.status_code == 200
    rows = r.json()["rows"]
    assert [row["model"] for row in rows] == ["correlated"] * 3
    assert all("missed_literal" in row for row in rows)


def test_sweep_request_seed_echoed(client):
    r = client.post("/api/sweep", json={
        "pi": {"point": 0.05}, "n_range": [2, 3], "seed": 999, **FAST})
    assert r.status_code == 200
    assert r.json()["seed"] == 999


def test_server_default_seed():
    with TestClient(create_app(seed=4242)) as c:
        r = c.post("/api/sweep", json={"pi": {"point": 0.05}, "n_range": [2, 3], **FAST})
        assert r.json()["seed"] == 4242
        r = c.post("/api/sweep", json={"pi": {"point": 0.05}, "n_range": [2, 3],
                                       "seed": 7, **FAST})
        assert r.json()["seed"] == 7


# --- validation envelope ------------------------------------------------------


def error_of(resp):
    assert set(resp.json()) == {"error"}
    return resp.json()["error"]


def test_sweep_bad_n_range(client):
    r = client.post("/api/sweep", json={"pi": {"point": 0.05}, "n_range": [0, 10], **FAST})
    assert r.status_code == 400
    err = error_of(r)
    assert err["code"] == "validation"
    assert "n_range" in err["message"]


def test_sweep_draw_cap(client):
    r = client.post("/api/sweep", json={"pi": {"point": 0.05}, "draws": 2_000_000})
    assert r.status_code == 400
    assert "draws" in error_of(r)["message"]


def test_sweep_missing_pi(client):
    r = client.post("/api/sweep", json={"tau": {"point": 0.1}, **FAST})
    assert r.status_code == 400
    assert "pi" in error_of(r)["message"]


def test_sweep_malformed_prior(client):
    r = client.post("/api/sweep", json={"pi": {"pointe": 0.05}, "n_range": [2, 3], **FAST})
    assert r.status_code == 400
    assert error_of(r)["code"] == "validation"


def test_malformed_json_body(client):
    r = client.post("/api/sweep", content="{not json",
                    headers={"Content-Type": "application/json"})
    assert r.status_code == 400
    assert error_of(r)["code"] == "validation"


def test_tail_fraction_bounds(client):
    r = client.post("/api/sweep", json={"pi": {"point": 0.05}, "tail_fraction": 1.2, **FAST})
    assert r.status_code == 400
    assert "tail_fraction" in error_of(r)["message"]


# --- simulate -----------------------------------------------------------------

SIM_BODY = {
    "scenario": {"prevalence_name": "Maine, October 2020",
                 "transmission_name": "Household (Spouses)"},
    "setting": "fixed",
    "replicates": 2,
    "n_range": [2, 4],
    "fda_threshold": 0.9,
    **FAST,
}


def test_simulate_catalog_scenario(client):
    r = client.post("/api/simulate", json=SIM_BODY)
    assert r.status_code == 200
    doc = r.json()
    assert doc["n"] == [2, 3, 4]
    assert doc["setting"] == "fixed"
    assert len(doc["fda_pass_rate"]) == 3
    assert doc["fda_threshold"] == 0.9
    assert doc["config"]["scenario"]["name"] == "Maine, October 2020 × Household (Spouses)"
    band = doc["metrics"]["sensitivity"]
    assert band["lo"] == band["hi"] == band["point"]


def test_simulate_deterministic_bytes(client):
    a = client.post("/api/simulate", json=SIM_BODY)
    b = client.post("/api/simulate", json=SIM_BODY)
    assert a.content == b.content


def test_simulate_explicit_priors(client):
    r = client.post("/api/simulate", json={
        "scenario": {"name": "custom pair", "pi": {"point": 0.03},
                     "tau": {"ci95": {"lo": 0.258, "hi": 0.505}}},
        "setting": "tau_graph", "replicates": 5, "n_range": [2, 3], **FAST})
    assert r.status_code == 200
    doc = r.json()
    assert doc["scenario"]["name"] == "custom pair"
    assert doc["replicates"] == 5
    band = doc["metrics"]["sensitivity"]
    assert band["lo"][1] <= band["hi"][1]


def test_simulate_replicate_cap(client):
    r = client.post("/api/simulate", json={**SIM_BODY, "replicates": 1001})
    assert r.status_code == 400
    assert "replicates" in error_of(r)["message"]


def test_simulate_half_named_scenario(client):
    r = client.post("/api/simulate", json={
        "scenario": {"prevalence_name": "Maine, October 2020"},
        "setting": "fixed", "replicates": 1, "n_range": [2, 3], **FAST})
    assert r.status_code == 400
    assert error_of(r)["code"] == "validation"


def test_simulate_empty_scenario(client):
    r = client.post("/api/simulate", json={
        "scenario": {}, "setting": "fixed", "replicates": 1, "n_range": [2, 3], **FAST})
    assert r.status_code == 400
    assert "scenario" in error_of(r)["message"]


def test_simulate_unknown_setting(client):
    r = client.post("/api/simulate", json={**SIM_BODY, "setting": "every_other"})
    assert r.status_code == 400


# --- fit-beta -----------------------------------------------------------------


def test_fit_beta(client):
    r = client.post("/api/fit-beta", json={"lo": 0.258, "hi": 0.505})
    assert r.status_code == 200
    doc = r.json()
    assert doc["alpha"] == pytest.approx(21.78, rel=0.02)
    assert doc["beta"] == pytest.approx(35.92, rel=0.02)
    assert doc["p_lo"] == 0.025
    assert doc["version"] == __version__


def test_fit_beta_bad_interval(client):
    r = client.post("/api/fit-beta", json={"lo": 0.5, "hi": 0.4})
    assert r.status_code == 400
    assert error_of(r)["code"] == "validation"


# --- recommend ----------------------------------------------------------------

REC_BODY = {
    "scenario": {"pi": {"point": 0.054}, "tau": {"point": 0.18}},
    "setting": "fixed",
    "replicates": 1,
    "n_range": [1, 30],
    **FAST,
}


def test_recommend_unconstrained(client):
    r = client.post("/api/recommend", json=REC_BODY)
    assert r.status_code == 200
    doc = r.json()
    eta = doc["result"]["metrics"]["tests_per_sample"]["point"]
    assert doc["n"] == doc["result"]["n"][eta.index(min(eta))]
    assert doc["feasible_ns"] == list(range(1, 31))
    assert doc["binding_constraint"] is None
    assert doc["config"]["objective"] == "min_tests"


def test_recommend_infeasible(client):
    r = client.post("/api/recommend", json={**REC_BODY, "min_sensitivity": 1.01})
    assert r.status_code == 422
    err = error_of(r)
    assert err["code"] == "infeasible"
    assert err["binding_constraint"] == "min_sensitivity"
    assert "min_sensitivity" in err["message"]


def test_recommend_objective_validation(client):
    r = client.post("/api/recommend", json={**REC_BODY, "objective": "maximize"})
    assert r.status_code == 400
    assert "objective" in error_of(r)["message"]


# --- cross-request behavior ---------------------------------------------------


def test_statelessness(client):
    body_x = {"pi": {"point": 0.05}, "n_range": [2, 3], **FAST}
    body_y = {"pi": {"point": 0.11}, "tau": {"point": 0.4}, "n_range": [4, 6], **FAST}
    first = client.post("/api/sweep", json=body_x)
    client.post("/api/sweep", json=body_y)
    again = client.post("/api/sweep", json=body_x)
    assert first.content == again.content


def test_cors_preflight():
    origin = "http://localhost:5173"
    with TestClient(create_app(cors_origins=[origin])) as c:
        r = c.options("/api/sweep", headers={
            "Origin": origin,
            "Access-Control-Request-Method": "POST",
        })
        assert r.status_code == 200
        assert r.headers["access-control-allow-origin"] == origin
    with TestClient(create_app()) as c:
        r = c.get("/api/health", headers={"Origin": origin})
        assert "access-control-allow-origin" not in r.headers
