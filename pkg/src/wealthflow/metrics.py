"""
Inequality measures and distribution diagnostics for money vectors.

All functions accept any 1-d sequence of nonnegative numbers and are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, DegenerateInputError, MetricDomainError


def _as_vector(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("money vector must be a nonempty 1-d sequence")
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ValueError("money values must be finite and nonnegative")
    return arr


def _positive_mean(arr: np.ndarray) -> float:
    mean = float(arr.mean())
    if mean <= 0:
        raise DegenerateInputError("all-zero money vector")
    return mean


@dataclass(frozen=True)
class LorenzCurve:
    x: np.ndarray  # cumulative population share
    y: np.ndarray  # cumulative money share

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.y.tolist()))


def lorenz(values) -> LorenzCurve:
    arr = np.sort(_as_vector(values), kind="stable")
    _positive_mean(arr)
    n = arr.size
    y = np.concatenate(([0.0], np.cumsum(arr) / arr.sum()))
    x = np.arange(n + 1) / n
    # cumsum rounding can leave the last point at 1 - eps
    y[-1] = 1.0
    return LorenzCurve(x=x, y=y)


def gini(values) -> float:
    """Trapezoid rule over the Lorenz curve: 1 - sum (x_i - x_{i-1})(y_i + y_{i-1})."""
    curve = lorenz(values)
    dx = np.diff(curve.x)
    return float(1.0 - np.sum(dx * (curve.y[1:] + curve.y[:-1])))


def generalized_entropy(values, beta: float) -> float:
    if beta == 0 or beta == 1:
        raise MetricDomainError("GE limit cases beta=0 and beta=1 are not supported")
    arr = _as_vector(values)
    mean = _positive_mean(arr)
    if beta < 0 and np.any(arr == 0):
        raise MetricDomainError("zero money with negative beta")
    ratio = arr / mean
    ge = (np.mean(ratio**beta) - 1.0) / (beta * (beta - 1.0))
    return max(float(ge), 0.0)


def atkinson(values, e: float) -> float:
    if e < 0:
        raise MetricDomainError("inequality aversion must be >= 0")
    arr = _as_vector(values)
    mean = _positive_mean(arr)
    if e >= 1 and np.any(arr == 0):
        raise MetricDomainError("zero money with aversion >= 1")
    if e == 1:
        ede = math.exp(float(np.mean(np.log(arr))))
    else:
        ede = float(np.mean((arr / mean) ** (1.0 - e))) ** (1.0 / (1.0 - e)) * mean
    return max(1.0 - ede / mean, 0.0)


def tail_size(n: int, x_percent: float) -> int:
    """Members per tail for a decile-style ratio, floor(n * x / 100) computed exactly."""
    return math.floor(Fraction(n) * Fraction(x_percent) / 100)


def decile_dispersion(values, x_percent: float = 10.0) -> float:
    """Mean of the richest x% over mean of the poorest x%; ``math.inf`` when the poor tail holds nothing."""
    if not 0 < x_percent <= 50:
        raise ConfigError("x_percent must lie in (0, 50]")
    arr = np.sort(_as_vector(values))
    k = tail_size(arr.size, x_percent)
    if k < 1:
        raise ConfigError(f"tail of {x_percent}% of {arr.size} values is empty")
    bottom = float(arr[:k].mean())
    top = float(arr[-k:].mean())
    if bottom == 0:
        return math.inf
    return top / bottom


def summary(values) -> dict:
    arr = _as_vector(values)
    # population variance: the vector is the whole society
    if np.all(arr == np.floor(arr)):
        # integer holdings: exact rational moments, correctly rounded once
        ints = [int(v) for v in arr]
        n, s1, s2 = len(ints), sum(ints), sum(v * v for v in ints)
        return {"mean": float(Fraction(s1, n)), "variance": float(Fraction(n * s2 - s1 * s1, n * n))}
    return {"mean": float(arr.mean()), "variance": float(arr.var())}


@dataclass(frozen=True)
class ExpFit:
    """Exponential (Boltzmann-Gibbs) fit ``P(m) = C exp(-m / T)`` with T the mean money."""

    T: float
    C: float
    ks_stat: Optional[float]
    degenerate: bool = False


def ks_exponential(values, mean: float) -> float:
    """Kolmogorov-Smirnov distance between the empirical CDF and Exponential(mean)."""
    arr = np.sort(_as_vector(values))
    n = arr.size
    cdf = -np.expm1(-arr / mean)
    upper = np.arange(1, n + 1) / n - cdf
    lower = cdf - np.arange(n) / n
    return float(max(upper.max(), lower.max(), 0.0))


def bg_fit(values) -> ExpFit:
    arr = _as_vector(values)
    T = _positive_mean(arr)
    if np.all(arr == arr[0]):
        return ExpFit(T=T, C=1.0 / T, ks_stat=None, degenerate=True)
    return ExpFit(T=T, C=1.0 / T, ks_stat=ks_exponential(arr, T))


def histogram(values, bin_width: int = 10) -> list[tuple[int, int]]:
    """Counts in bins ``[lo, lo + bin_width)`` from 0 up to the bin holding the maximum."""
    if bin_width < 1:
        raise ConfigError("bin_width must be >= 1")
    arr = _as_vector(values)
    idx = np.floor(arr / bin_width).astype(np.int64)
    counts = np.bincount(idx)
    return [(i * bin_width, int(c)) for i, c in enumerate(counts)]


def _or_none(fn, *args) -> Optional[float]:
    try:
        val = fn(*args)
    except (MetricDomainError, DegenerateInputError):
        return None
    return None if math.isinf(val) else val


def snapshot_record(tick: int, values: Sequence) -> dict:
    """Flat metric record for one tick; entries undefined for this vector are None."""
    arr = _as_vector(values)
    stats = summary(arr)
    fit = bg_fit(arr) if arr.sum() > 0 else None
    return {
        "tick": int(tick),
        "mean": stats["mean"],
        "variance": stats["variance"],
        "gini": _or_none(gini, arr),
        "ge_beta2": _or_none(generalized_entropy, arr, 2.0),
        "atkinson_e1": _or_none(atkinson, arr, 1.0),
        "decile_ratio_10": _or_none(decile_dispersion, arr, 10.0) if arr.size >= 10 else None,
        "ks_stat": None if fit is None else fit.ks_stat,
    }
