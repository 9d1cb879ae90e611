"""Within-pool infection-count laws.

A pool of n samples drawn from one social unit.  Each member is seeded by
community transmission independently with probability π; given j seeded
members, each remaining member is then infected through the unit's contact
network with probability 1 − (1−τ)^j (one transmission round, τ per contact).
The resulting count S of infected samples is what downstream testing sees:

    P[S = 0] = (1−π)^n
    P[S = K] = Σ_{j=1..K} C(n,j) π^j (1−π)^{n−j} · C(n−j, K−j)
               · (1 − (1−τ)^j)^{K−j} · ((1−τ)^j)^{n−K}          (K ≥ 1)

The null law is the τ = 0 special case (independent Binomial).  Heterogeneous
variants mix the base law over pool-level groups of τ values, π values, or
paired (π, τ) values with uniform weights by default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import special

from .errors import InternalConsistencyError, ParameterError
from .streams import NS_SIMULATION, derive_rng

__all__ = [
    "PoolParams",
    "ModelKind",
    "CountDistribution",
    "TauRegion",
    "count_distribution",
    "simulate_counts",
    "marginal_infection_prob",
    "pair_correlation",
    "expected_positives",
    "prob_multiple_given_positive",
    "min_tau_for_increment",
    "robust_tau_region",
]

_NORMALIZATION_TOL = 1e-9
_NEGATIVE_CLAMP = -1e-12   # complement round-off at large n, never model error


@dataclass(frozen=True)
class PoolParams:
    """Pool size with community-seeding and per-contact transmission rates."""

    n: int
    pi: float
    tau: float = 0.0

    def __post_init__(self):
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 1):
            raise ParameterError(f"pool size must be an integer >= 1, got {self.n}")
        if not (0.0 <= self.pi <= 1.0):
            raise ParameterError(f"pi must lie in [0, 1], got {self.pi}")
        if not (0.0 <= self.tau <= 1.0):
            raise ParameterError(f"tau must lie in [0, 1], got {self.tau}")


@dataclass(frozen=True)
class ModelKind:
    """Which count law to evaluate.

    ``null`` ignores the network (τ treated as 0); ``correlated`` uses the
    scalar (π, τ) from :class:`PoolParams`.  The heterogeneous kinds carry
    pool-level group values that override the corresponding scalar; groups are
    mixed with uniform weights unless explicit ``weights`` are given.
    """

    kind: str
    taus: tuple[float, ...] | None = None
    pis: tuple[float, ...] | None = None
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("null", "correlated", "het_tau", "het_pi", "het_both"):
            raise ParameterError(f"unknown model kind {self.kind!r}")
        if self.kind in ("het_tau", "het_both") and not self.taus:
            raise ParameterError(f"{self.kind} requires a non-empty tau group sequence")
        if self.kind in ("het_pi", "het_both") and not self.pis:
            raise ParameterError(f"{self.kind} requires a non-empty pi group sequence")
        if self.kind == "het_both" and len(self.pis) != len(self.taus):
            raise ParameterError("het_both requires paired pi/tau sequences of equal length")
        for name, vals in (("tau", self.taus), ("pi", self.pis)):
            if vals is not None and any(not (0.0 <= v <= 1.0) for v in vals):
                raise ParameterError(f"{name} group values must lie in [0, 1]")
        if self.weights is not None:
            m = self.n_groups
            if len(self.weights) != m:
                raise ParameterError("weights length must match the number of groups")
            if any(w < 0 for w in self.weights):
                raise ParameterError("weights must be non-negative")
            if abs(sum(self.weights) - 1.0) > 1e-9:
                raise ParameterError("weights must sum to 1")

    @property
    def n_groups(self) -> int:
        if self.kind in ("het_tau", "het_both"):
            return len(self.taus)
        if self.kind == "het_pi":
            return len(self.pis)
        return 1

    @staticmethod
    def null() -> "ModelKind":
        return ModelKind(kind="null")

    @staticmethod
    def correlated() -> "ModelKind":
        return ModelKind(kind="correlated")

    @staticmethod
    def het_tau(taus, weights=None) -> "ModelKind":
        return ModelKind(kind="het_tau", taus=tuple(float(t) for t in taus),
                         weights=None if weights is None else tuple(weights))

    @staticmethod
    def het_pi(pis, weights=None) -> "ModelKind":
        return ModelKind(kind="het_pi", pis=tuple(float(p) for p in pis),
                         weights=None if weights is None else tuple(weights))

    @staticmethod
    def het_both(pis, taus, weights=None) -> "ModelKind":
        return ModelKind(kind="het_both", pis=tuple(float(p) for p in pis),
                         taus=tuple(float(t) for t in taus),
                         weights=None if weights is None else tuple(weights))

    def groups(self, params: PoolParams) -> list[tuple[float, float, float]]:
        """Resolve to [(weight, pi, tau), ...] against scalar parameters."""
        m = self.n_groups
        w = self.weights if self.weights is not None else (1.0 / m,) * m
        if self.kind == "null":
            return [(1.0, params.pi, 0.0)]
        if self.kind == "correlated":
            return [(1.0, params.pi, params.tau)]
        if self.kind == "het_tau":
            return [(w[i], params.pi, self.taus[i]) for i in range(m)]
        if self.kind == "het_pi":
            return [(w[i], self.pis[i], params.tau) for i in range(m)]
        return [(w[i], self.pis[i], self.taus[i]) for i in range(m)]


@dataclass(eq=False)
class CountDistribution:
    """Exact pmf of the infected count S over {0, ..., n}."""

    n: int
    probs: np.ndarray

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float)
        if self.probs.shape != (self.n + 1,):
            raise ParameterError("probs must have length n + 1")

    @property
    def p_positive(self) -> float:
        """Probability the pool contains at least one infected sample."""
        return float(1.0 - self.probs[0])

    def conditional_positive(self) -> np.ndarray:
        """P[S = k | S >= 1] for k = 1..n."""
        if self.p_positive <= 0.0:
            raise ParameterError("conditioning on an empty pool-positive event")
        return self.probs[1:] / self.p_positive

    def mean(self) -> float:
        return float(np.dot(np.arange(self.n + 1), self.probs))


def _pow01(base: float, expo: int) -> float:
    # 0^0 == 1 by convention throughout the count law
    return 1.0 if expo == 0 else base ** expo


def _single_group_pmf(n: int, pi: float, tau: float) -> np.ndarray:
    """Exact count law for one (π, τ) group.

    Vectorized over the (seeds j, total K) triangle with log-space binomial
    coefficients, so it stays exact and fast up to n = 100.  NumPy's 0.0**0
    is 1.0, which is the convention the law needs at τ ∈ {0, 1}.
    """
    probs = np.zeros(n + 1)
    if pi == 0.0:
        probs[0] = 1.0
        return probs
    if pi == 1.0:
        probs[n] = 1.0
        return probs

    lg = special.gammaln(np.arange(n + 2))
    j = np.arange(1, n + 1)[:, None]   # community-seeded members
    K = np.arange(1, n + 1)[None, :]   # total infected after the network round
    d = np.maximum(K - j, 0)           # network-infected members (j > K masked below)

    log_seed = (lg[n + 1] - lg[j + 1] - lg[n - j + 1]
                + j * math.log(pi) + (n - j) * math.log1p(-pi))
    log_choose = lg[n - j + 1] - lg[d + 1] - lg[n - K + 1]
    escape = (1.0 - tau) ** j          # a non-seed avoids all j seeds
    terms = (np.exp(log_seed + log_choose)
             * (1.0 - escape) ** d * escape ** (n - K))
    probs[1:] = np.where(K >= j, terms, 0.0).sum(axis=0)

    p0 = math.exp(n * math.log1p(-pi))
    tail = math.fsum(probs[1:])
    if abs(tail - (1.0 - p0)) >= _NORMALIZATION_TOL:
        raise InternalConsistencyError(
            f"count-law tail mass {tail!r} does not complement P[S=0]={p0!r} "
            f"(n={n}, pi={pi}, tau={tau})"
        )
    probs[0] = 1.0 - tail
    return probs


def count_distribution(params: PoolParams, kind: ModelKind) -> CountDistribution:
    """Exact count distribution for the requested model kind."""
    probs = np.zeros(params.n + 1)
    for weight, pi, tau in kind.groups(params):
        probs += weight * _single_group_pmf(params.n, pi, tau)
    if np.any(probs < _NEGATIVE_CLAMP):
        raise InternalConsistencyError("count law produced a negative probability")
    np.clip(probs, 0.0, None, out=probs)
    return CountDistribution(n=params.n, probs=probs)


def simulate_counts(
    params: PoolParams,
    kind: ModelKind,
    reps: int,
    seed: int,
    *,
    chunk_size: int = 65536,
    threads: int = 1,
) -> np.ndarray:
    """Generative sampler for the count law; returns empirical frequencies.

    Replicates are processed in fixed-size chunks whose random streams are
    derived from (seed, chunk index), so the result is a pure function of the
    arguments regardless of thread count.
    """
    if reps < 1:
        raise ParameterError("reps must be >= 1")
    n = params.n
    groups = kind.groups(params)
    weights = np.array([g[0] for g in groups])
    g_pi = np.array([g[1] for g in groups])
    g_tau = np.array([g[2] for g in groups])

    def run_chunk(c: int) -> np.ndarray:
        m = min(chunk_size, reps - c * chunk_size)
        rng = derive_rng(seed, NS_SIMULATION, c)
        if len(groups) == 1:
            pi = np.full(m, g_pi[0])
            tau = np.full(m, g_tau[0])
        else:
            gi = rng.choice(len(groups), size=m, p=weights)
            pi, tau = g_pi[gi], g_tau[gi]
        seeded = rng.binomial(n, pi)
        with np.errstate(invalid="ignore"):
            p_net = -np.expm1(seeded * np.log1p(-tau))
        p_net = np.where(seeded == 0, 0.0, p_net)   # no seed, no network round
        extra = rng.binomial(n - seeded, p_net)
        return np.bincount(seeded + extra, minlength=n + 1)

    n_chunks = (reps + chunk_size - 1) // chunk_size
    if threads > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            hists = list(pool.map(run_chunk, range(n_chunks)))
    else:
        hists = [run_chunk(c) for c in range(n_chunks)]
    return np.sum(hists, axis=0) / reps


# ── closed-form summaries ────────────────────────────────────────────────────


def marginal_infection_prob(params: PoolParams) -> float:
    """P[one fixed member is infected] = 1 − (1−π)(1−πτ)^(n−1)."""
    n, pi, tau = params.n, params.pi, params.tau
    return float(1.0 - (1.0 - pi) * (1.0 - pi * tau) ** (n - 1))


def pair_correlation(params: PoolParams) -> float:
    """Correlation of two members' infection indicators.

    Cov = (1−π)²[(1−πτ(2−τ))^(n−2) − (1−πτ)^(2n−2)], divided by the
    Bernoulli variance of the (exchangeable) marginal.  Undefined for pools
    of one or for degenerate marginals.
    """
    n, pi, tau = params.n, params.pi, params.tau
    if n < 2:
        raise ParameterError("pair correlation needs a pool of at least 2")
    p = marginal_infection_prob(params)
    if not (0.0 < p < 1.0):
        raise ParameterError(f"correlation undefined: marginal is degenerate (p={p})")
    # expm1 keeps precision when both powers sit next to 1
    a = (n - 2) * math.log1p(-pi * tau * (2.0 - tau))
    b = (2 * n - 2) * math.log1p(-pi * tau)
    cov = (1.0 - pi) ** 2 * (math.expm1(a) - math.expm1(b))
    return float(cov / (p * (1.0 - p)))


def expected_positives(params: PoolParams, conditional: bool = False) -> float:
    """E[S], or E[S | S > 0] when ``conditional`` is set."""
    n, pi, tau = params.n, params.pi, params.tau
    unconditional = n * pi + (1.0 - pi) * n * (1.0 - (1.0 - tau * pi) ** (n - 1))
    if not conditional:
        return float(unconditional)
    p_pos = -math.expm1(n * math.log1p(-pi)) if pi < 1.0 else 1.0
    if p_pos <= 0.0:
        raise ParameterError("conditional mean undefined at pi = 0")
    return float(unconditional / p_pos)


def prob_multiple_given_positive(params: PoolParams, conditional: bool = True) -> float:
    """P[S ≥ 2 | S ≥ 1] (or unconditional P[S ≥ 2] with ``conditional=False``)."""
    n, pi, tau = params.n, params.pi, params.tau
    p0 = (1.0 - pi) ** n
    p1 = n * pi * (1.0 - pi) ** (n - 1) * _pow01(1.0 - tau, n - 1)
    multiple = max(0.0, 1.0 - p0 - p1)
    if not conditional:
        return float(multiple)
    if pi == 0.0:
        raise ParameterError("conditional probability undefined at pi = 0")
    return float(multiple / (1.0 - p0))


def min_tau_for_increment(n: int, pi: float, k: int, *, tol: float = 1e-10) -> float | None:
    """Smallest τ lifting E[S | S > 0] to 1 + k; None when unreachable.

    The conditional mean rises monotonically from its τ=0 value to n at τ=1,
    so bisection applies; returns 0.0 when the target is already met without
    any network transmission.
    """
    if n < 2:
        raise ParameterError("needs a pool of at least 2")
    if not (0.0 < pi <= 1.0):
        raise ParameterError(f"pi must lie in (0, 1], got {pi}")
    if not (1 <= k <= n - 1):
        raise ParameterError(f"increment k must lie in 1..{n - 1}, got {k}")

    target = 1.0 + k

    def gap(tau: float) -> float:
        return expected_positives(PoolParams(n, pi, tau), conditional=True) - target

    if gap(1.0) < -1e-12:
        return None
    if gap(0.0) >= 0.0:
        return 0.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if gap(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return float(0.5 * (lo + hi))


@dataclass(frozen=True)
class TauRegion:
    """τ values where a lone extra network infection is rare.

    The criterion (n−1)τ(1−τ)^(n−2) — the chance that network transmission
    adds exactly one infected sample — must not exceed ``tolerance``.  The
    region is one or two closed intervals; the right one may be the
    degenerate [1, 1] (for n = 2 the criterion is τ itself, which does not
    vanish at 1, but a fully-infected pair poses no lone-extra risk).
    """

    n: int
    tolerance: float
    intervals: tuple[tuple[float, float], ...]

    def criterion(self, tau: float) -> float:
        return float((self.n - 1) * tau * _pow01(1.0 - tau, self.n - 2))

    def contains(self, tau: float, *, eps: float = 1e-9) -> bool:
        return any(lo - eps <= tau <= hi + eps for lo, hi in self.intervals)


def robust_tau_region(n: int, tolerance: float = 0.05) -> TauRegion:
    """Solve the unimodal criterion for its tolerance crossings by bisection."""
    if n < 2:
        raise ParameterError("needs a pool of at least 2")
    if not (0.0 < tolerance < 1.0):
        raise ParameterError(f"tolerance must lie in (0, 1), got {tolerance}")

    def g(tau: float) -> float:
        return (n - 1) * tau * _pow01(1.0 - tau, n - 2)

    peak = min(1.0, 1.0 / (n - 1))
    if g(peak) <= tolerance:
        return TauRegion(n=n, tolerance=tolerance, intervals=((0.0, 1.0),))

    def bisect(lo: float, hi: float, rising: bool) -> float:
        # crossing of g - tolerance on a monotone branch
        while hi - lo > 1e-10:
            mid = 0.5 * (lo + hi)
            if (g(mid) < tolerance) == rising:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    r1 = bisect(0.0, peak, rising=True)
    r2 = 1.0 if peak >= 1.0 else bisect(peak, 1.0, rising=False)
    return TauRegion(n=n, tolerance=tolerance, intervals=((0.0, r1), (r2, 1.0)))
