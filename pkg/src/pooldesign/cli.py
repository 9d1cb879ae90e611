"""Command-line front door for the pool-design engine.

Subcommands::

    metrics     one (n, π, τ) configuration → the four metrics
    sweep       pool-size range → per-(n, model) metric table
    simulate    scenario × sampling setting → credible-band curves
    fit-beta    95% CI → Beta(α, β) prior
    recommend   constrained pool-size choice
    catalog     list the built-in prevalence/transmission settings
    serve       start the HTTP JSON API

Exit codes: 0 success, 2 usage error, 1 computation error.  Every stochastic
subcommand reports the effective seed (flag, else POOL_DESIGN_SEED, else the
built-in default) on stderr and embeds it in JSON output.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .ct import CtPopulation, DetectionCurve, parse_curve
from .errors import ParameterError
from .infection import ModelKind, PoolParams
from .metrics import (
    DEFAULT_SENS_DRAWS,
    evaluate_pool,
    rows_to_csv,
    rows_to_json,
    sweep_pool_sizes,
)
from .priors import BetaParams, PriorSpec, WeibullParams, fit_beta_from_quantiles
from .scenarios import (
    Constraints,
    Scenario,
    SimulationSetting,
    builtin_catalog,
    catalog_lookup,
    parse_setting,
    recommend_pool_size,
    result_to_csv,
    result_to_json,
    run_setting,
    scenario_from_catalog,
    scenario_from_json,
)
from .streams import default_seed

__all__ = ["main", "build_parser"]


# ── flag parsers (ValueError subclasses → argparse usage errors, exit 2) ─────


def _parse_n_range(text: str) -> tuple[int, int]:
    """'5' → (5, 5); '1..30' → (1, 30)."""
    lo, sep, hi = text.partition("..")
    try:
        lo_i = int(lo)
        hi_i = int(hi) if sep else lo_i
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"bad pool-size range {text!r}; use N or LO..HI") from None
    if lo_i < 1 or hi_i < lo_i:
        raise argparse.ArgumentTypeError(f"bad pool-size range {text!r}")
    return lo_i, hi_i


def _parse_prior(text: str) -> PriorSpec:
    """'0.054' | 'beta:14.38,251.01' | 'ci:0.03,0.084'."""
    kind, sep, rest = text.partition(":")
    try:
        if not sep:
            return PriorSpec.point(float(text))
        if kind == "beta":
            a, b = (float(v) for v in rest.split(","))
            return PriorSpec.from_beta(BetaParams(a, b))
        if kind == "ci":
            lo, hi = (float(v) for v in rest.split(","))
            return PriorSpec.from_ci95(lo, hi)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad prior {text!r}: {exc}") from None
    raise argparse.ArgumentTypeError(
        f"bad prior {text!r}; use a number, beta:A,B, or ci:LO,HI")


def _parse_weibull(text: str) -> WeibullParams:
    try:
        shape, scale = (float(v) for v in text.split(","))
        return WeibullParams(shape, scale)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad Weibull spec {text!r}: {exc}") from None


def _parse_bind(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep:
        raise argparse.ArgumentTypeError(f"bad bind address {text!r}; use HOST:PORT")
    try:
        return host or "127.0.0.1", int(port)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad port in {text!r}") from None


def _curve_type(text: str) -> DetectionCurve:
    return parse_curve(text)        # ParameterError is a ValueError → exit 2


def _setting_type(text: str) -> str:
    return parse_setting(text)


# ── shared helpers ───────────────────────────────────────────────────────────


def _population(args) -> CtPopulation:
    return CtPopulation(
        weibull=args.weibull,
        tail_fraction=args.tail,
        tail_threshold=args.tail_ct,
    )


def _seed(args) -> int:
    return args.seed if args.seed is not None else default_seed()


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj, out: str | None) -> None:
    _emit(json.dumps(obj, indent=2) + "\n", out)


def _note_seed(seed: int) -> None:
    print(f"seed: {seed}", file=sys.stderr)


def _scenario(args) -> Scenario:
    if args.scenario:
        doc = json.loads(Path(args.scenario).read_text())
        return scenario_from_json(doc)
    if args.pi_name and args.tau_name:
        return scenario_from_catalog(args.pi_name, args.tau_name)
    pi = catalog_lookup(args.pi_name).prior() if args.pi_name else args.pi
    tau = catalog_lookup(args.tau_name).prior() if args.tau_name else args.tau
    if pi is None or tau is None:
        raise ParameterError(
            "give both priors: --pi/--pi-name and --tau/--tau-name "
            "(or a --scenario file)")
    name = " × ".join(filter(None, [args.pi_name or "custom π", args.tau_name or "custom τ"]))
    return Scenario(name=name, pi=pi, tau=tau)


# ── subcommand handlers ──────────────────────────────────────────────────────


def _cmd_metrics(args) -> int:
    seed = _seed(args)
    kind = ModelKind.null() if args.model == "null" else ModelKind.correlated()
    row = evaluate_pool(
        PoolParams(args.n[0], args.pi.mean, args.tau.mean),
        kind, _population(args), args.curve, args.draws, seed,
        perfect_test=args.perfect_test,
    )
    _note_seed(seed)
    if args.format == "csv":
        _emit(rows_to_csv([row], include_literal=args.missed_literal), args.out)
    else:
        payload = rows_to_json([row], include_literal=args.missed_literal)[0]
        payload["seed"] = seed
        _emit_json(payload, args.out)
    return 0


def _cmd_sweep(args) -> int:
    seed = _seed(args)
    rows = sweep_pool_sizes(
        args.n[0], args.n[1], args.pi.mean, args.tau.mean,
        _population(args), args.curve,
        draws=args.draws, seed=seed, threads=args.threads,
    )
    _note_seed(seed)
    if args.format == "csv":
        _emit(rows_to_csv(rows, include_literal=args.missed_literal), args.out)
    else:
        _emit_json(
            {"seed": seed, "rows": rows_to_json(rows, include_literal=args.missed_literal)},
            args.out,
        )
    return 0


def _cmd_simulate(args) -> int:
    seed = _seed(args)
    scenario = _scenario(args)
    setting = SimulationSetting(kind=args.setting, replicates=args.reps, seed=seed)
    result = run_setting(
        scenario, setting, args.n[0], args.n[1],
        _population(args), args.curve, args.draws, threads=args.threads,
    )
    _note_seed(seed)
    if args.format == "csv":
        _emit(result_to_csv(result), args.out)
    else:
        _emit_json(result_to_json(result), args.out)
    return 0


def _cmd_fit_beta(args) -> int:
    params = fit_beta_from_quantiles(args.lo, args.hi, args.p_lo, args.p_hi)
    _emit_json(
        {
            "alpha": params.alpha,
            "beta": params.beta,
            "mean": params.mean,
            "lo": args.lo,
            "hi": args.hi,
            "p_lo": args.p_lo,
            "p_hi": args.p_hi,
        },
        args.out,
    )
    return 0


def _cmd_recommend(args) -> int:
    seed = _seed(args)
    scenario = _scenario(args)
    setting = SimulationSetting(kind=args.setting, replicates=args.reps, seed=seed)
    rec = recommend_pool_size(
        scenario, setting, args.n[0], args.n[1],
        Constraints(min_sensitivity=args.min_sensitivity, min_pass_rate=args.min_pass_rate),
        args.objective.replace("-", "_"),
        _population(args), args.curve, args.draws,
        perfect_test=args.perfect_test, threads=args.threads,
    )
    _note_seed(seed)
    payload = {
        "n": rec.n,
        "infeasible": rec.n is None,
        "objective": rec.objective,
        "constraints": {
            "min_sensitivity": args.min_sensitivity,
            "min_pass_rate": args.min_pass_rate,
        },
        "binding_constraint": rec.binding_constraint,
        "feasible_ns": list(rec.feasible_ns),
        "seed": seed,
        "result": result_to_json(rec.result),
    }
    _emit_json(payload, args.out)
    return 0


def _cmd_catalog(args) -> int:
    entries = []
    for e in builtin_catalog():
        lo, hi = e.effective_ci()
        entries.append({
            "name": e.name,
            "parameter": e.parameter,
            "stated_mean": e.stated_mean,
            "display_ci": list(e.display_ci),
            "effective_ci": [lo, hi],
            "alpha": e.beta.alpha,
            "beta": e.beta.beta,
            "citation": e.citation,
        })
    if args.format == "csv":
        lines = ["name,parameter,stated_mean,ci_lo,ci_hi,alpha,beta,citation"]
        for e in entries:
            lines.append(
                f"\"{e['name']}\",{e['parameter']},{e['stated_mean']!r},"
                f"{e['display_ci'][0]!r},{e['display_ci'][1]!r},"
                f"{e['alpha']!r},{e['beta']!r},\"{e['citation']}\""
            )
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit_json({"entries": entries}, args.out)
    return 0


def _cmd_serve(args) -> int:
    from . import service   # deferred: pulls in fastapi/uvicorn

    host, port = args.bind
    service.serve(host, port, cors_origins=args.cors, seed=_seed(args))
    return 0


# ── parser assembly ──────────────────────────────────────────────────────────


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="json",
                   help="output format (default json)")
    p.add_argument("--out", metavar="PATH", help="write output to a file instead of stdout")


def _add_engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None,
                   help="master seed (default: POOL_DESIGN_SEED or built-in constant)")
    p.add_argument("--curve", type=_curve_type, default=DetectionCurve.step(35.0),
                   metavar="SPEC", help="detection curve: step:LOD or logistic:LOD,WIDTH")
    p.add_argument("--tail", type=float, default=0.25,
                   help="fraction of positives with Ct above --tail-ct (default 0.25)")
    p.add_argument("--tail-ct", type=float, default=35.0,
                   help="Ct threshold the tail fraction refers to (default 35)")
    p.add_argument("--weibull", type=_parse_weibull,
                   default=WeibullParams(4.5, 30.0), metavar="SHAPE,SCALE",
                   help="Ct population Weibull parameters (default 4.5,30)")
    p.add_argument("--draws", type=int, default=DEFAULT_SENS_DRAWS,
                   help="Monte Carlo draws per sensitivity cell (default 100000)")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads for sweeps and replicates (default 1)")


def _add_prior_flags(p: argparse.ArgumentParser, *, required: bool) -> None:
    p.add_argument("--pi", type=_parse_prior, required=required, metavar="PRIOR",
                   help="prevalence: a number, beta:A,B, or ci:LO,HI")
    p.add_argument("--tau", type=_parse_prior, required=required, metavar="PRIOR",
                   help="per-contact transmission: a number, beta:A,B, or ci:LO,HI")


def _add_scenario_flags(p: argparse.ArgumentParser) -> None:
    _add_prior_flags(p, required=False)
    p.add_argument("--pi-name", metavar="NAME", help="catalog prevalence setting")
    p.add_argument("--tau-name", metavar="NAME", help="catalog transmission setting")
    p.add_argument("--scenario", metavar="PATH", help="scenario JSON document")
    p.add_argument("--setting", type=_setting_type, default="all_graph",
                   help="fixed | tau-graph | pi-graph | all-graph (default all-graph)")
    p.add_argument("--reps", type=int, default=100,
                   help="replicates per setting (default 100)")
    p.add_argument("--n", type=_parse_n_range, default=(1, 30), metavar="LO..HI",
                   help="pool-size range (default 1..30)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pool-design",
        description="Dorfman pool-size design under correlated infections",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("metrics", help="metrics for one configuration")
    p.add_argument("--n", type=_parse_n_range, required=True, metavar="N")
    _add_prior_flags(p, required=True)
    p.add_argument("--model", choices=("correlated", "null"), default="correlated")
    p.add_argument("--perfect-test", action="store_true",
                   help="assume an always-detecting assay (all s_k = 1)")
    p.add_argument("--missed-literal", action="store_true",
                   help="also report the historical missed-cases expression")
    _add_engine_flags(p)
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_metrics)

    p = sub.add_parser("sweep", help="metric table over a pool-size range")
    p.add_argument("--n", type=_parse_n_range, required=True, metavar="LO..HI")
    _add_prior_flags(p, required=True)
    p.add_argument("--missed-literal", action="store_true",
                   help="also report the historical missed-cases expression")
    _add_engine_flags(p)
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser("simulate", help="credible-band curves for a scenario")
    _add_scenario_flags(p)
    _add_engine_flags(p)
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("fit-beta", help="fit Beta(α, β) to a 95%% CI")
    p.add_argument("--lo", type=float, required=True, help="lower CI endpoint")
    p.add_argument("--hi", type=float, required=True, help="upper CI endpoint")
    p.add_argument("--p-lo", type=float, default=0.025, help="lower quantile level")
    p.add_argument("--p-hi", type=float, default=0.975, help="upper quantile level")
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_fit_beta)

    p = sub.add_parser("recommend", help="constrained pool-size recommendation")
    _add_scenario_flags(p)
    p.add_argument("--min-sensitivity", type=float, default=None,
                   help="required point-estimate sensitivity")
    p.add_argument("--min-pass-rate", type=float, default=None,
                   help="required FDA pass rate across replicates")
    p.add_argument("--objective", choices=("min-tests", "max-savings"),
                   default="min-tests")
    p.add_argument("--perfect-test", action="store_true",
                   help="assume an always-detecting assay (all s_k = 1)")
    _add_engine_flags(p)
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_recommend)

    p = sub.add_parser("catalog", help="list built-in scenario settings")
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_catalog)

    p = sub.add_parser("serve", help="run the HTTP JSON API")
    p.add_argument("--bind", type=_parse_bind, default=("127.0.0.1", 8000),
                   metavar="HOST:PORT", help="bind address (default 127.0.0.1:8000)")
    p.add_argument("--cors", default=None, metavar="ORIGINS",
                   help="comma-separated allowed CORS origins")
    p.add_argument("--seed", type=int, default=None,
                   help="server default seed for requests that omit one")
    p.set_defaults(handler=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:     # --help (0) or usage error (2)
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except (ParameterError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RuntimeError as exc:   # fit non-convergence, consistency failures
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
