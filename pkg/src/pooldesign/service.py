"""HTTP JSON API for the pool-design engine.

Endpoints
    GET  /api/health      liveness + engine version
    GET  /api/catalog     the twelve built-in prevalence/transmission settings
    POST /api/sweep       pool-size metric table at point parameters
    POST /api/simulate    credible-band curves for a scenario × setting
    POST /api/fit-beta    Beta(α, β) from a 95% CI
    POST /api/recommend   constrained pool-size choice

All errors are ``{"error": {"code", "message"}}``: 400 for validation
problems (the message names the offending field), 422 when no pool size
satisfies the requested constraints, 500 otherwise.  Responses echo the
effective seed and the fully-resolved configuration so clients can
reproduce any number exactly.  The service holds no mutable state beyond
a concurrent-reader-safe memoization cache, so identical requests give
identical responses in any order.
"""

from __future__ import annotations

from typing import Literal

import uvicorn
from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field, model_validator

from . import __version__ as ENGINE_VERSION
from .ct import CtPopulation, DetectionCurve
from .errors import FitConvergenceError, ParameterError
from .infection import ModelKind
from .metrics import rows_to_json, sweep_pool_sizes
from .priors import PriorSpec, WeibullParams, fit_beta_from_quantiles
from .scenarios import (
    Constraints,
    Scenario,
    SimulationSetting,
    builtin_catalog,
    fda_pass_rate,
    parse_setting,
    recommend_pool_size,
    result_to_json,
    run_setting,
    scenario_from_catalog,
    scenario_to_json,
)
from .streams import default_seed

__all__ = ["create_app", "serve"]

MAX_REPLICATES = 1000
MAX_N = 100


# ── request schemas ──────────────────────────────────────────────────────────


class CurveSpec(BaseModel):
    kind: Literal["step", "logistic"] = "step"
    lod: float = 35.0
    width: float | None = None

    def build(self) -> DetectionCurve:
        if self.kind == "step":
            return DetectionCurve.step(self.lod)
        if self.width is None:
            raise ParameterError("curve.width is required for a logistic curve")
        return DetectionCurve.logistic(self.lod, self.width)

    def echo(self) -> dict:
        return {"kind": self.kind, "lod": self.lod, "width": self.width}


class WeibullSpec(BaseModel):
    shape: float = 4.5
    scale: float = 30.0


class EngineOptions(BaseModel):
    """Knobs shared by every computing endpoint."""

    n_range: tuple[int, int] = (1, 30)
    curve: CurveSpec = CurveSpec()
    weibull: WeibullSpec = WeibullSpec()
    tail_fraction: float = Field(0.25, gt=0.0, lt=1.0)
    tail_ct: float = 35.0
    draws: int = Field(100_000, ge=1, le=1_000_000)
    seed: int | None = None

    @model_validator(mode="after")
    def _check_n_range(self):
        lo, hi = self.n_range
        if not (1 <= lo <= hi <= MAX_N):
            raise ValueError(f"n_range must satisfy 1 <= lo <= hi <= {MAX_N}")
        return self

    def population(self) -> CtPopulation:
        return CtPopulation(
            weibull=WeibullParams(self.weibull.shape, self.weibull.scale),
            tail_fraction=self.tail_fraction,
            tail_threshold=self.tail_ct,
        )

    def echo(self) -> dict:
        return {
            "n_range": list(self.n_range),
            "curve": self.curve.echo(),
            "weibull": {"shape": self.weibull.shape, "scale": self.weibull.scale},
            "tail_fraction": self.tail_fraction,
            "tail_ct": self.tail_ct,
            "draws": self.draws,
        }


class SweepRequest(EngineOptions):
    pi: dict
    tau: dict = {"point": 0.0}
    models: list[Literal["null", "correlated"]] = ["null", "correlated"]
    include_literal: bool = False


class ScenarioSpec(BaseModel):
    """Either two catalog names, or explicit priors with an optional name."""

    name: str | None = None
    pi: dict | None = None
    tau: dict | None = None
    prevalence_name: str | None = None
    transmission_name: str | None = None

    def resolve(self) -> Scenario:
        if self.prevalence_name and self.transmission_name:
            return scenario_from_catalog(self.prevalence_name, self.transmission_name)
        if self.prevalence_name or self.transmission_name:
            raise ParameterError(
                "scenario: give both prevalence_name and transmission_name, or priors")
        if self.pi is None or self.tau is None:
            raise ParameterError("scenario: pi and tau priors are required")
        return Scenario(
            name=self.name or "custom",
            pi=PriorSpec.from_json(self.pi),
            tau=PriorSpec.from_json(self.tau),
        )


class SimulateRequest(EngineOptions):
    scenario: ScenarioSpec
    setting: str = "all_graph"
    replicates: int = Field(100, ge=1, le=MAX_REPLICATES)
    fda_threshold: float = Field(0.85, gt=0.0, lt=1.0)


class RecommendRequest(SimulateRequest):
    min_sensitivity: float | None = None
    min_pass_rate: float | None = None
    objective: Literal["min_tests", "max_savings"] = "min_tests"


class FitBetaRequest(BaseModel):
    lo: float
    hi: float
    p_lo: float = 0.025
    p_hi: float = 0.975


# ── application ──────────────────────────────────────────────────────────────


def _error(status: int, code: str, message: str, **extra) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"error": {"code": code, "message": message, **extra}},
    )


def _catalog_entries() -> list[dict]:
    out = []
    for e in builtin_catalog():
        lo, hi = e.effective_ci()
        out.append({
            "name": e.name,
            "parameter": e.parameter,
            "stated_mean": e.stated_mean,
            "display_ci": list(e.display_ci),
            "effective_ci": [lo, hi],
            "beta": {"alpha": e.beta.alpha, "beta": e.beta.beta},
            "citation": e.citation,
        })
    return out


def create_app(cors_origins: list[str] | None = None, seed: int | None = None) -> FastAPI:
    """Build the API application; ``seed`` is the server default."""
    app = FastAPI(title="pool-design", version=ENGINE_VERSION)
    server_seed = seed if seed is not None else default_seed()

    if cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=cors_origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(RequestValidationError)
    async def _on_validation(request, exc: RequestValidationError):
        parts = []
        for err in exc.errors():
            loc = ".".join(str(p) for p in err["loc"] if p != "body")
            parts.append(f"{loc or 'body'}: {err['msg']}")
        return _error(400, "validation", "; ".join(parts))

    @app.exception_handler(ParameterError)
    async def _on_parameter(request, exc: ParameterError):
        return _error(400, "validation", str(exc))

    @app.exception_handler(FitConvergenceError)
    async def _on_fit(request, exc: FitConvergenceError):
        return _error(400, "validation", str(exc))

    @app.exception_handler(Exception)
    async def _on_internal(request, exc: Exception):
        return _error(500, "internal", f"{type(exc).__name__}: {exc}")

    @app.get("/api/health")
    def health():
        return {"status": "ok", "version": ENGINE_VERSION}

    @app.get("/api/catalog")
    def catalog():
        return {"entries": _catalog_entries(), "version": ENGINE_VERSION}

    @app.post("/api/sweep")
    def sweep(req: SweepRequest):
        seed = req.seed if req.seed is not None else server_seed
        pi = PriorSpec.from_json(req.pi)
        tau = PriorSpec.from_json(req.tau)
        kinds = tuple(
            ModelKind.null() if m == "null" else ModelKind.correlated()
            for m in req.models
        )
        rows = sweep_pool_sizes(
            req.n_range[0], req.n_range[1], pi.mean, tau.mean,
            req.population(), req.curve.build(), kinds, req.draws, seed,
        )
        config = req.echo() | {
            "pi": pi.to_json(), "pi_point": pi.mean,
            "tau": tau.to_json(), "tau_point": tau.mean,
            "models": list(req.models),
        }
        return {
            "rows": rows_to_json(rows, include_literal=req.include_literal),
            "seed": seed,
            "version": ENGINE_VERSION,
            "config": config,
        }

    @app.post("/api/simulate")
    def simulate(req: SimulateRequest):
        seed = req.seed if req.seed is not None else server_seed
        scenario = req.scenario.resolve()
        setting = SimulationSetting(
            kind=parse_setting(req.setting), replicates=req.replicates, seed=seed)
        result = run_setting(
            scenario, setting, req.n_range[0], req.n_range[1],
            req.population(), req.curve.build(), req.draws,
        )
        payload = result_to_json(result)
        payload["fda_pass_rate"] = fda_pass_rate(result, req.fda_threshold).tolist()
        payload["fda_threshold"] = req.fda_threshold
        payload["version"] = ENGINE_VERSION
        payload["config"] = req.echo() | {
            "setting": setting.kind,
            "replicates": setting.replicates,
            "scenario": scenario_to_json(scenario),
            "fda_threshold": req.fda_threshold,
        }
        return payload

    @app.post("/api/fit-beta")
    def fit_beta(req: FitBetaRequest):
        params = fit_beta_from_quantiles(req.lo, req.hi, req.p_lo, req.p_hi)
        return {
            "alpha": params.alpha,
            "beta": params.beta,
            "mean": params.mean,
            "lo": req.lo,
            "hi": req.hi,
            "p_lo": req.p_lo,
            "p_hi": req.p_hi,
            "version": ENGINE_VERSION,
        }

    @app.post("/api/recommend")
    def recommend(req: RecommendRequest):
        seed = req.seed if req.seed is not None else server_seed
        scenario = req.scenario.resolve()
        setting = SimulationSetting(
            kind=parse_setting(req.setting), replicates=req.replicates, seed=seed)
        rec = recommend_pool_size(
            scenario, setting, req.n_range[0], req.n_range[1],
            Constraints(req.min_sensitivity, req.min_pass_rate),
            req.objective, req.population(), req.curve.build(), req.draws,
        )
        config = req.echo() | {
            "setting": setting.kind,
            "replicates": setting.replicates,
            "scenario": scenario_to_json(scenario),
            "objective": req.objective,
            "min_sensitivity": req.min_sensitivity,
            "min_pass_rate": req.min_pass_rate,
        }
        if rec.n is None:
            return _error(
                422, "infeasible",
                "no pool size in range satisfies the constraints "
                f"(binding: {rec.binding_constraint})",
                binding_constraint=rec.binding_constraint,
            )
        return {
            "n": rec.n,
            "objective": rec.objective,
            "feasible_ns": list(rec.feasible_ns),
            "binding_constraint": None,
            "result": result_to_json(rec.result),
            "seed": seed,
            "version": ENGINE_VERSION,
            "config": config,
        }

    return app


def serve(
    host: str = "127.0.0.1",
    port: int = 8000,
    *,
    cors_origins: str | list[str] | None = None,
    seed: int | None = None,
) -> None:
    """Run the API with uvicorn (blocking)."""
    if isinstance(cors_origins, str):
        cors_origins = [o.strip() for o in cors_origins.split(",") if o.strip()]
    uvicorn.run(create_app(cors_origins=cors_origins, seed=seed), host=host, port=port)
