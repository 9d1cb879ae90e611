"""Ct-value physics: individual Ct law, pooled dilution, and detection.

Viral load is 2^(−Ct) up to a constant, so pooling K positive samples into a
pool of n dilutes the combined load by n and the pooled cycle threshold is

    dilution_ct = −log₂(Σ_i 2^(−ct_i)) + log₂(n)

which sits between min(ct) and min(ct) + log₂(n).  Individual Ct values
follow a Weibull law shifted so a chosen fraction of the population exceeds a
reference threshold.  A detection curve maps the Ct actually measured (pooled
or individual) to a detection probability; an all-negative pool is never
detected (specificity-failure rate taken as zero).
"""

from __future__ import annotations

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ParameterError
from .priors import DEFAULT_CT_WEIBULL, WeibullParams, calibrate_ct_shift, weibull_mean, weibull_quantile
from .streams import DEFAULT_SEED, NS_GENERIC, NS_SENSITIVITY, derive_rng

__all__ = [
    "DetectionCurve",
    "CtPopulation",
    "DilutionSample",
    "SensitivityEstimate",
    "dilution_ct",
    "pooled_lod",
    "detection_prob",
    "parse_curve",
    "sensitivity_given_k",
    "individual_sensitivity",
    "clear_sensitivity_cache",
    "hitchhiker_exceed_mean_prob",
    "hitchhiker_exceed_individual_prob",
    "hitchhiker_exceed_individual_approx",
]

_LOG19 = math.log(19.0)
_CHUNK = 65536


@dataclass(frozen=True)
class DetectionCurve:
    """Detection probability as a function of measured Ct.

    ``step`` detects strictly below ``lod`` and never at or above it, so a
    sample exactly at the limit of detection counts as missed.  ``logistic``
    is a smooth alternative with its midpoint placed ln(19) widths above
    ``lod`` so the detection probability at ``lod`` is exactly 0.95.
    """

    kind: str
    lod: float
    width: float | None = None

    def __post_init__(self):
        if self.kind not in ("step", "logistic"):
            raise ParameterError(f"unknown detection curve kind {self.kind!r}")
        if not math.isfinite(self.lod):
            raise ParameterError("lod must be finite")
        if self.kind == "logistic" and not (self.width is not None and self.width > 0):
            raise ParameterError("logistic curve requires a positive width")

    @staticmethod
    def step(lod: float) -> "DetectionCurve":
        return DetectionCurve(kind="step", lod=float(lod))

    @staticmethod
    def logistic(lod: float, width: float) -> "DetectionCurve":
        return DetectionCurve(kind="logistic", lod=float(lod), width=float(width))

    def prob(self, ct):
        ct = np.asarray(ct, dtype=float)
        if self.kind == "step":
            out = (ct < self.lod).astype(float)
        else:
            midpoint = self.lod + self.width * _LOG19
            out = 1.0 / (1.0 + np.exp((ct - midpoint) / self.width))
        return float(out) if out.ndim == 0 else out


def detection_prob(ct, curve: DetectionCurve):
    """Probability that a specimen measured at ``ct`` is called positive."""
    return curve.prob(ct)


def parse_curve(text: str) -> DetectionCurve:
    """Parse ``step:<lod>`` or ``logistic:<lod>,<width>``."""
    kind, _, rest = text.partition(":")
    try:
        if kind == "step":
            return DetectionCurve.step(float(rest))
        if kind == "logistic":
            lod, width = rest.split(",")
            return DetectionCurve.logistic(float(lod), float(width))
    except (ValueError, ParameterError) as exc:
        raise ParameterError(f"bad detection curve {text!r}: {exc}") from None
    raise ParameterError(f"bad detection curve {text!r}: kind must be step or logistic")


@dataclass(frozen=True)
class CtPopulation:
    """Shifted-Weibull law of individual Ct values among true positives.

    The shift is derived at construction so that ``tail_fraction`` of the
    population lies above ``tail_threshold``; draws use inverse-CDF sampling
    so sampled exceedance matches :meth:`survival` exactly in distribution.
    """

    weibull: WeibullParams = DEFAULT_CT_WEIBULL
    tail_fraction: float = 0.25
    tail_threshold: float = 35.0
    shift: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "shift",
            calibrate_ct_shift(self.weibull, self.tail_fraction, self.tail_threshold),
        )

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return self.shift + weibull_quantile(self.weibull, rng.random(size))

    def survival(self, x: float) -> float:
        """P[Ct > x]."""
        if x <= self.shift:
            return 1.0
        z = (x - self.shift) / self.weibull.scale
        return math.exp(-(z ** self.weibull.shape))

    def mean(self) -> float:
        return self.shift + weibull_mean(self.weibull)


def _dilution_rows(cts: np.ndarray, n: int) -> np.ndarray:
    """dilution_ct along axis 1, min-shifted before exponentiating."""
    m = cts.min(axis=1, keepdims=True)
    s = np.exp2(m - cts).sum(axis=1)
    return m[:, 0] - np.log2(s) + math.log2(n)


def dilution_ct(cts, n: int) -> float:
    """Ct of a pool of size n containing exactly these positive samples."""
    arr = np.asarray(cts, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ParameterError("need at least one positive Ct value")
    if arr.size > n:
        raise ParameterError(f"{arr.size} positives cannot fit a pool of {n}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError("Ct values must be finite")
    return float(_dilution_rows(arr[None, :], n)[0])


def pooled_lod(individual_lod: float, n: int, *, floor: bool = False) -> float:
    """Individual-Ct cutoff equivalent to detecting the pooled specimen.

    A pool of n is detectable only when its content would have produced an
    individual Ct below ``individual_lod − log₂(n)``; ``floor`` rounds the
    cutoff down to a whole cycle.
    """
    if n < 1:
        raise ParameterError("pool size must be >= 1")
    raw = individual_lod - math.log2(n)
    return float(math.floor(raw)) if floor else raw


@dataclass(frozen=True)
class DilutionSample:
    """One pooled measurement: positive members' Cts and the resulting Ct."""

    individual_cts: tuple[float, ...]
    pool_size: int
    dilution_ct: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "dilution_ct",
            dilution_ct(self.individual_cts, self.pool_size),
        )


class SensitivityEstimate(NamedTuple):
    value: float
    se: float


_sens_cache: dict = {}
_sens_lock = threading.Lock()


def clear_sensitivity_cache() -> None:
    with _sens_lock:
        _sens_cache.clear()


def sensitivity_given_k(
    k: int,
    n: int,
    pop: CtPopulation,
    curve: DetectionCurve,
    draws: int = 100_000,
    seed: int = DEFAULT_SEED,
    *,
    threads: int = 1,
) -> SensitivityEstimate:
    """Detection probability of a pool of n holding exactly k positives.

    Monte Carlo over k-tuples of individual Ct draws pushed through the
    dilution formula and the detection curve.  Deterministic given the seed:
    draws are consumed in fixed chunks with streams derived from
    (seed, n, k, chunk), so the estimate is invariant to thread count.
    Estimates are memoized per (k, n, pop, curve, draws, seed).
    """
    if not (1 <= k <= n):
        raise ParameterError(f"k must lie in 1..{n}, got {k}")
    if draws < 1:
        raise ParameterError("draws must be >= 1")

    key = (k, n, pop, curve, draws, seed)
    hit = _sens_cache.get(key)
    if hit is not None:
        return hit

    def run_chunk(c: int) -> tuple[float, float]:
        m = min(_CHUNK, draws - c * _CHUNK)
        rng = derive_rng(seed, NS_SENSITIVITY, n, k, c)
        cts = pop.sample(rng, (m, k))
        vals = detection_prob(_dilution_rows(cts, n), curve)
        return float(np.sum(vals)), float(np.sum(vals * vals))

    n_chunks = (draws + _CHUNK - 1) // _CHUNK
    if threads > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run_chunk, range(n_chunks)))
    else:
        parts = [run_chunk(c) for c in range(n_chunks)]

    total = sum(p[0] for p in parts)
    total_sq = sum(p[1] for p in parts)
    mean = total / draws
    if draws > 1:
        var = max(0.0, (total_sq - draws * mean * mean) / (draws - 1))
        se = math.sqrt(var / draws)
    else:
        se = 0.0
    est = SensitivityEstimate(value=float(mean), se=float(se))
    with _sens_lock:
        _sens_cache[key] = est
    return est


def individual_sensitivity(
    pop: CtPopulation,
    curve: DetectionCurve,
    draws: int = 100_000,
    seed: int = DEFAULT_SEED,
) -> SensitivityEstimate:
    """Detection probability of one positive tested alone (k = n = 1)."""
    return sensitivity_given_k(1, 1, pop, curve, draws, seed)


# ── hitchhiker-effect analytics ──────────────────────────────────────────────
#
# "Hitchhiker": a weakly-loaded positive that an individual test would miss
# can still ride along when pooled with strongly-loaded ones, because the
# pooled Ct ≈ min(ct) + log₂(n) is driven by the strongest member.


def hitchhiker_exceed_mean_prob(K: int, n: int, w: WeibullParams) -> float:
    """P[pooled Ct exceeds the population mean Ct], min-statistic form.

    Using dilution_ct ≈ min + log₂(n) and the closure of Weibull minima:
    exp(−K·((mean − log₂ n)/λ)^k).  Requires the dilution offset to stay
    below the mean, otherwise the approximation has no content.
    """
    if K < 1:
        raise ParameterError("K must be >= 1")
    if n < 1:
        raise ParameterError("pool size must be >= 1")
    mean = weibull_mean(w)
    offset = math.log2(n)
    if offset >= mean:
        raise ParameterError(
            f"dilution offset log2({n})={offset:.3f} reaches the mean Ct {mean:.3f}"
        )
    return math.exp(-K * ((mean - offset) / w.scale) ** w.shape)


def hitchhiker_exceed_individual_prob(
    K: int,
    n: int,
    w: WeibullParams,
    draws: int = 100_000,
    seed: int = DEFAULT_SEED,
) -> float:
    """P[pooled Ct of K positives exceeds an independent individual Ct].

    Monte Carlo with the min-statistic form min(K draws) + log₂(n); the
    population shift cancels between the two sides, so raw Weibull draws
    suffice.  See :func:`hitchhiker_exceed_individual_approx` for the rough
    closed form reported alongside.
    """
    if K < 1:
        raise ParameterError("K must be >= 1")
    if n < 1:
        raise ParameterError("pool size must be >= 1")
    if draws < 1:
        raise ParameterError("draws must be >= 1")
    offset = math.log2(n)
    hits = 0
    done = 0
    chunk_idx = 0
    while done < draws:
        m = min(_CHUNK, draws - done)
        rng = derive_rng(seed, NS_GENERIC, 1, K, n, chunk_idx)
        pooled = weibull_quantile(w, rng.random((m, K))).min(axis=1) + offset
        individual = weibull_quantile(w, rng.random(m))
        hits += int(np.sum(pooled > individual))
        done += m
        chunk_idx += 1
    return hits / draws


def hitchhiker_exceed_individual_approx(K: int, n: int) -> float:
    """Rough closed form (1/2 + 0.01·log₂ n)^K for the exceedance above."""
    return (0.5 + 0.01 * math.log2(n)) ** K
