"""Parameter priors and the qPCR viral-load population model.

Two parameter families drive the engine: Beta priors over rates (prevalence
and per-contact transmission), elicited either directly or from 95% credible
intervals, and a shifted Weibull population of cycle-threshold (Ct) values
whose location is calibrated so a chosen fraction of samples sits above a
detectability threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np
from scipy import special

from .errors import FitConvergenceError, ParameterError

__all__ = [
    "BetaParams",
    "WeibullParams",
    "PriorSpec",
    "DEFAULT_CT_WEIBULL",
    "ALT_CT_WEIBULL",
    "beta_cdf",
    "beta_ppf",
    "fit_beta_from_quantiles",
    "sample_prior",
    "weibull_quantile",
    "weibull_mean",
    "calibrate_ct_shift",
]


# ── parameter records ────────────────────────────────────────────────────────


@dataclass(frozen=True)
class BetaParams:
    """Shape parameters of a Beta distribution; both must be positive."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ParameterError(f"alpha must be positive and finite, got {self.alpha}")
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ParameterError(f"beta must be positive and finite, got {self.beta}")

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)

    @property
    def variance(self) -> float:
        s = self.alpha + self.beta
        return self.alpha * self.beta / (s * s * (s + 1.0))


@dataclass(frozen=True)
class WeibullParams:
    """Weibull(shape k, scale λ) describing a Ct population before shifting."""

    shape: float
    scale: float

    def __post_init__(self):
        if not (self.shape > 0 and math.isfinite(self.shape)):
            raise ParameterError(f"shape must be positive and finite, got {self.shape}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ParameterError(f"scale must be positive and finite, got {self.scale}")


# Default Ct-population shape/scale pair, and the slightly re-fit alternate
# pair used by the closed-form pooling analytics.
DEFAULT_CT_WEIBULL = WeibullParams(shape=4.5, scale=30.0)
ALT_CT_WEIBULL = WeibullParams(shape=4.55, scale=29.86)


@dataclass(frozen=True)
class PriorSpec:
    """A rate parameter given either as a point value or a Beta prior.

    Three construction routes: ``point(x)``, ``from_beta(params)``, and
    ``from_ci95(lo, hi)``; the CI route fits a Beta on the spot and keeps the
    elicitation interval for provenance.  ``kind`` is ``"point"`` or ``"beta"``.
    """

    kind: str
    value: float | None = None
    params: BetaParams | None = None
    source_ci: tuple[float, float] | None = None

    def __post_init__(self):
        if self.kind == "point":
            if self.value is None or not (0.0 <= self.value <= 1.0):
                raise ParameterError(f"point prior needs a value in [0, 1], got {self.value}")
        elif self.kind == "beta":
            if self.params is None:
                raise ParameterError("beta prior needs BetaParams")
        else:
            raise ParameterError(f"unknown prior kind {self.kind!r}")

    @staticmethod
    def point(value: float) -> "PriorSpec":
        return PriorSpec(kind="point", value=float(value))

    @staticmethod
    def from_beta(params: BetaParams) -> "PriorSpec":
        return PriorSpec(kind="beta", params=params)

    @staticmethod
    def from_ci95(lo: float, hi: float) -> "PriorSpec":
        params = fit_beta_from_quantiles(lo, hi)
        return PriorSpec(kind="beta", params=params, source_ci=(float(lo), float(hi)))

    @property
    def mean(self) -> float:
        return self.value if self.kind == "point" else self.params.mean

    def sample(self, rng: np.random.Generator, size: int | None = None):
        return sample_prior(self, rng, size)

    # wire format: {"point": x} | {"beta": {"alpha": a, "beta": b}}
    #            | {"ci95": {"lo": q_lo, "hi": q_hi}}  (fitted on load)
    @staticmethod
    def from_json(obj: Mapping[str, Any]) -> "PriorSpec":
        if not isinstance(obj, Mapping):
            raise ParameterError(f"prior spec must be an object, got {type(obj).__name__}")
        keys = set(obj)
        if keys == {"point"}:
            return PriorSpec.point(float(obj["point"]))
        if keys == {"beta"}:
            b = obj["beta"]
            return PriorSpec.from_beta(BetaParams(float(b["alpha"]), float(b["beta"])))
        if keys == {"ci95"}:
            ci = obj["ci95"]
            return PriorSpec.from_ci95(float(ci["lo"]), float(ci["hi"]))
        raise ParameterError(
            "prior spec must have exactly one of the keys 'point', 'beta', 'ci95'"
        )

    def to_json(self) -> dict[str, Any]:
        if self.kind == "point":
            return {"point": self.value}
        out: dict[str, Any] = {"beta": {"alpha": self.params.alpha, "beta": self.params.beta}}
        if self.source_ci is not None:
            out["ci95"] = {"lo": self.source_ci[0], "hi": self.source_ci[1]}
        return out


# ── Beta distribution operations ─────────────────────────────────────────────


def beta_cdf(params: BetaParams, x: float) -> float:
    """Regularized incomplete beta function I_x(α, β)."""
    if not (0.0 <= x <= 1.0):
        raise ParameterError(f"x must lie in [0, 1], got {x}")
    return float(special.betainc(params.alpha, params.beta, x))


def beta_ppf(params: BetaParams, p: float, *, tol: float = 1e-14) -> float:
    """Inverse CDF by bisection on ``beta_cdf``; monotone, so always safe."""
    if not (0.0 < p < 1.0):
        raise ParameterError(f"p must lie in (0, 1), got {p}")
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if beta_cdf(params, mid) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol * max(hi, 1e-300):
            break
    return 0.5 * (lo + hi)


def _fit_residual(log_ab: np.ndarray, q_lo: float, q_hi: float,
                  p_lo: float, p_hi: float) -> np.ndarray:
    # keep runaway Newton trials inside the same box the bisection fallback
    # searches, so a wild step degrades the residual instead of underflowing
    a, b = np.exp(np.clip(log_ab, -30.0, 30.0))
    params = BetaParams(float(a), float(b))
    return np.array([beta_cdf(params, q_lo) - p_lo, beta_cdf(params, q_hi) - p_hi])


def fit_beta_from_quantiles(
    q_lo: float,
    q_hi: float,
    p_lo: float = 0.025,
    p_hi: float = 0.975,
    *,
    tol: float = 1e-9,
    max_iter: int = 200,
) -> BetaParams:
    """Find (α, β) with CDF(q_lo) = p_lo and CDF(q_hi) = p_hi.

    Damped Newton on (log α, log β) minimizing the squared CDF residuals,
    seeded by moment matching at the interval midpoint with pseudo-sample-size
    4/(q_hi − q_lo)²; falls back to coordinate bisection when a Newton step
    cannot reduce the residual.  Raises :class:`FitConvergenceError` with the
    last residuals if neither route converges.
    """
    if not (0.0 < q_lo < q_hi < 1.0):
        raise ParameterError(f"need 0 < q_lo < q_hi < 1, got ({q_lo}, {q_hi})")
    if not (0.0 < p_lo < p_hi < 1.0):
        raise ParameterError(f"need 0 < p_lo < p_hi < 1, got ({p_lo}, {p_hi})")

    mid = 0.5 * (q_lo + q_hi)
    pseudo_n = 4.0 / (q_hi - q_lo) ** 2
    log_ab = np.log([mid * pseudo_n, (1.0 - mid) * pseudo_n])

    resid = _fit_residual(log_ab, q_lo, q_hi, p_lo, p_hi)
    for _ in range(max_iter):
        if np.max(np.abs(resid)) < tol:
            a, b = np.exp(log_ab)
            return BetaParams(float(a), float(b))
        # finite-difference Jacobian in log-parameter space
        jac = np.empty((2, 2))
        h = 1e-6
        for j in range(2):
            bumped = log_ab.copy()
            bumped[j] += h
            jac[:, j] = (_fit_residual(bumped, q_lo, q_hi, p_lo, p_hi) - resid) / h
        try:
            step = np.linalg.solve(jac, resid)
        except np.linalg.LinAlgError:
            break
        # backtracking damping on the squared residual
        improved = False
        t = 1.0
        ss0 = float(resid @ resid)
        while t > 1.0 / 4096.0:
            trial = log_ab - t * step
            trial_resid = _fit_residual(trial, q_lo, q_hi, p_lo, p_hi)
            if float(trial_resid @ trial_resid) < ss0:
                log_ab, resid = np.clip(trial, -30.0, 30.0), trial_resid
                improved = True
                break
            t *= 0.5
        if not improved:
            break

    if np.max(np.abs(resid)) < tol:
        a, b = np.exp(log_ab)
        return BetaParams(float(a), float(b))
    return _fit_by_coordinate_bisection(q_lo, q_hi, p_lo, p_hi, tol=tol)


def _fit_by_coordinate_bisection(q_lo, q_hi, p_lo, p_hi, *, tol, sweeps=500):
    """Alternate monotone one-dimensional solves: α against the lower
    quantile (CDF decreasing in α), then β against the upper (increasing)."""

    def solve_mono(f, lo, hi, increasing, iters=80):
        for _ in range(iters):
            m = 0.5 * (lo + hi)
            if (f(m) < 0.0) == increasing:
                lo = m
            else:
                hi = m
        return 0.5 * (lo + hi)

    log_a, log_b = 0.0, 0.0
    resid = None
    for _ in range(sweeps):
        log_a = solve_mono(
            lambda la: beta_cdf(BetaParams(math.exp(la), math.exp(log_b)), q_lo) - p_lo,
            -30.0, 30.0, increasing=False)
        log_b = solve_mono(
            lambda lb: beta_cdf(BetaParams(math.exp(log_a), math.exp(lb)), q_hi) - p_hi,
            -30.0, 30.0, increasing=True)
        resid = _fit_residual(np.array([log_a, log_b]), q_lo, q_hi, p_lo, p_hi)
        if np.max(np.abs(resid)) < tol:
            return BetaParams(math.exp(log_a), math.exp(log_b))
    raise FitConvergenceError(
        f"quantile fit did not converge for ({q_lo}, {q_hi}); residuals {tuple(resid)}",
        residuals=resid,
    )


def sample_prior(spec: PriorSpec, rng: np.random.Generator, size: int | None = None):
    """Draw from a prior; point priors broadcast their value."""
    if spec.kind == "point":
        return spec.value if size is None else np.full(size, spec.value)
    return rng.beta(spec.params.alpha, spec.params.beta, size=size)


# ── Weibull Ct population ────────────────────────────────────────────────────


def weibull_quantile(params: WeibullParams, u):
    """Inverse CDF λ·(−ln(1−u))^(1/k) for u in [0, 1)."""
    u = np.asarray(u, dtype=float)
    if np.any((u < 0.0) | (u >= 1.0)):
        raise ParameterError("u must lie in [0, 1)")
    q = params.scale * (-np.log1p(-u)) ** (1.0 / params.shape)
    return float(q) if q.ndim == 0 else q


def weibull_mean(params: WeibullParams) -> float:
    return params.scale * float(special.gamma(1.0 + 1.0 / params.shape))


def calibrate_ct_shift(
    params: WeibullParams, tail_fraction: float = 0.25, threshold: float = 35.0
) -> float:
    """Additive shift δ so that P[X + δ > threshold] = tail_fraction.

    δ = threshold − Q(1 − tail_fraction); negative shifts are legitimate when
    the unshifted population already has a heavier tail than requested.
    """
    if not (0.0 < tail_fraction < 1.0):
        raise ParameterError(f"tail_fraction must lie in (0, 1), got {tail_fraction}")
    return float(threshold - weibull_quantile(params, 1.0 - tail_fraction))
