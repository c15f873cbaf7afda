"""Sample statistics for extinction-time campaigns.

Everything here is a pure function of its input samples, with reductions
done via math.fsum (or numpy's pairwise sums) so that repeated aggregation
of the same samples is bit-for-bit reproducible.

The centrepiece quantities: the renormalized samples s/mean(s), whose
distribution is compared against the unit-mean exponential via a one-sample
Kolmogorov-Smirnov distance; a density-normalized histogram; and an
ordinary-least-squares fit of mean extinction time against log(n).
"""
from __future__ import annotations

import math
from typing import Callable, Iterable, NamedTuple, Optional, Sequence

import numpy as np


class StatsError(ValueError):
    pass


class Histogram(NamedTuple):
    edges: tuple[float, ...]  # bin_count + 1 ascending edges, starting at 0
    densities: tuple[float, ...]  # count / (n * width) per bin


class SampleStats(NamedTuple):
    mean: float
    variance: Optional[float]  # unbiased; absent for a single sample
    renormalized_variance: Optional[float]


class LogFit(NamedTuple):
    C: float  # slope of mean vs log(n)
    intercept: float
    r_squared: float
    C_no_intercept: float  # constrained fit through the origin, for comparison


def mean(samples: Sequence[float]) -> float:
    if len(samples) == 0:
        raise StatsError("mean of empty sample set")
    return math.fsum(samples) / len(samples)


def variance(samples: Sequence[float]) -> float:
    """Unbiased (n-1 denominator) sample variance; two-pass for accuracy."""
    n = len(samples)
    if n < 2:
        raise StatsError(f"variance needs at least 2 samples, got {n}")
    m = mean(samples)
    return math.fsum((s - m) ** 2 for s in samples) / (n - 1)


def renormalize(samples: Sequence[float]) -> list[float]:
    """Scale samples by 1/mean, so the result has empirical mean 1."""
    if len(samples) == 0:
        raise StatsError("renormalize of empty sample set")
    m = mean(samples)
    if m == 0.0:
        raise StatsError("renormalize of zero-mean samples")
    return [s / m for s in samples]


def _exp1_cdf(x: float) -> float:
    return -math.expm1(-x) if x > 0.0 else 0.0


def ks_distance(
    samples: Sequence[float], cdf: Optional[Callable[[float], float]] = None
) -> float:
    """One-sample Kolmogorov-Smirnov distance to a reference CDF.

    Defaults to the unit-mean exponential, F(x) = 1 - e^{-x}. Computed as
    the classic sup over sorted points of max(i/n - F(x_i), F(x_i) - (i-1)/n).
    """
    n = len(samples)
    if n == 0:
        raise StatsError("ks_distance of empty sample set")
    xs = np.sort(np.asarray(samples, dtype=np.float64))
    if cdf is None:
        f = -np.expm1(-np.maximum(xs, 0.0))
    else:
        f = np.array([cdf(float(x)) for x in xs])
    i = np.arange(1, n + 1, dtype=np.float64)
    d_plus = i / n - f
    d_minus = f - (i - 1.0) / n
    return float(max(d_plus.max(), d_minus.max()))


def histogram(samples: Sequence[float], bin_count: int = 50) -> Histogram:
    """Equal-width bins on [0, max(samples)], densities integrating to 1."""
    if len(samples) == 0:
        raise StatsError("histogram of empty sample set")
    if bin_count < 1:
        raise StatsError(f"bin_count must be >= 1, got {bin_count}")
    top = max(samples)
    if not (top > 0.0) or not math.isfinite(top):
        raise StatsError(f"samples must have a positive finite maximum, got {top}")
    densities, edges = np.histogram(
        np.asarray(samples, dtype=np.float64), bins=bin_count, range=(0.0, top), density=True
    )
    return Histogram(tuple(float(e) for e in edges), tuple(float(d) for d in densities))


def summarize(samples: Sequence[float]) -> SampleStats:
    """Mean plus unbiased variance and the variance of samples/mean.

    A single sample has a well-defined mean but no variance; both variance
    fields are then absent rather than zero.
    """
    m = mean(samples)
    if len(samples) < 2:
        return SampleStats(m, None, None)
    return SampleStats(m, variance(samples), variance(renormalize(samples)))


def fit_log_growth(points: Iterable[tuple[float, float]]) -> LogFit:
    """Least-squares fit of mean_sigma = C * log(n) + intercept.

    `points` are (n, mean_sigma) pairs with n >= 1. Also reports the slope
    of the constrained fit through the origin, which is what an intercept-free
    asymptotic growth law would give.
    """
    pts = [(float(n), float(y)) for n, y in points]
    if len(pts) < 3:
        raise StatsError(f"log fit needs at least 3 points, got {len(pts)}")
    if any(n < 1.0 for n, _ in pts):
        raise StatsError("neuron counts must be >= 1")
    xs = [math.log(n) for n, _ in pts]
    ys = [y for _, y in pts]
    if max(xs) == min(xs):
        raise StatsError("log fit needs at least two distinct neuron counts")
    k = len(pts)
    mx = math.fsum(xs) / k
    my = math.fsum(ys) / k
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    sxy = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = my - slope * mx
    ss_res = math.fsum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys))
    ss_tot = math.fsum((y - my) ** 2 for y in ys)
    if ss_tot == 0.0:
        r_squared = 1.0 if ss_res == 0.0 else 0.0
    else:
        r_squared = 1.0 - ss_res / ss_tot
    slope0 = math.fsum(x * y for x, y in zip(xs, ys)) / math.fsum(x * x for x in xs)
    return LogFit(slope, intercept, r_squared, slope0)
