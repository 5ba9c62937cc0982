"""Prediction accuracy metrics and the rank-based statistical tests.

The two accuracy metrics follow the pairing used throughout the package:
MAPE measures value error, the mean rank difference (muRD) measures order
error. The Wilcoxon tests use the normal approximation with tie
correction; below the usable sample size they report p = 1 with a
small-sample flag instead of guessing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UndefinedMetricError

SPEARMAN_NEGLIGIBLE = 0.09
SPEARMAN_WEAK = 0.39
SPEARMAN_MODERATE = 0.69

MIN_SIGNED_RANK_N = 6
MIN_RANK_SUM_N = 4


def average_ranks(values) -> np.ndarray:
    """1-based ranks of `values`, ties sharing their average rank."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("expected a non-empty 1-d sequence")
    order = np.argsort(v, kind="stable")
    ranks = np.empty(v.size, dtype=float)
    i = 0
    while i < v.size:
        j = i
        while j + 1 < v.size and v[order[j + 1]] == v[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _paired(actual, predicted):
    a = np.asarray(actual, dtype=float)
    p = np.asarray(predicted, dtype=float)
    if a.shape != p.shape or a.ndim != 1:
        raise ValueError("actual and predicted must be 1-d and the same length")
    if a.size == 0:
        raise ValueError("empty input")
    return a, p


def mape(actual, predicted) -> float:
    """Mean absolute percentage error, in percent."""
    a, p = _paired(actual, predicted)
    if np.any(a == 0.0):
        raise UndefinedMetricError("mape is undefined when an actual value is zero")
    return float(np.mean(np.abs(a - p) / np.abs(a)) * 100.0)


def murd(actual, predicted) -> float:
    """Mean absolute rank difference between actual and predicted orders.

    Both sides are ranked with average ranks for ties, so the metric is
    invariant under strictly monotone transformations of either side.
    """
    a, p = _paired(actual, predicted)
    return float(np.mean(np.abs(average_ranks(a) - average_ranks(p))))


@dataclass(frozen=True)
class AccuracyReport:
    """Value error and rank error of one model on one test set."""

    mape: float | None
    murd: float
    n_test: int

    def to_record(self) -> dict:
        return {"mape": self.mape, "murd": self.murd, "n_test": self.n_test}


def accuracy_report(actual, predicted) -> AccuracyReport:
    """Bundle MAPE and muRD; MAPE is absent when an actual value is zero."""
    a, p = _paired(actual, predicted)
    try:
        value_err = mape(a, p)
    except UndefinedMetricError:
        value_err = None
    return AccuracyReport(mape=value_err, murd=murd(a, p), n_test=int(a.size))


def _normal_two_sided_p(z: float) -> float:
    return math.erfc(abs(z) / math.sqrt(2.0))


def correlation_strength(rho: float) -> str:
    """Bucket a correlation magnitude into the conventional strength labels."""
    a = abs(rho)
    if a > 1.0 + 1e-12:
        raise ValueError(f"|rho| must be <= 1, got {rho}")
    if a <= SPEARMAN_NEGLIGIBLE:
        return "negligible"
    if a <= SPEARMAN_WEAK:
        return "weak"
    if a <= SPEARMAN_MODERATE:
        return "moderate"
    return "strong"


@dataclass(frozen=True)
class CorrelationResult:
    rho: float
    p_value: float
    strength: str
    n: int


def spearman(x, y) -> CorrelationResult:
    """Spearman rank correlation with a z-score p-value.

    Ranks use average ranks for ties; the two-sided p-value comes from
    z = rho * sqrt(n - 1).
    """
    a, b = _paired(x, y)
    if a.size < 3:
        raise ValueError("spearman needs at least 3 pairs")
    ra = average_ranks(a)
    rb = average_ranks(b)
    da = ra - ra.mean()
    db = rb - rb.mean()
    sa = math.sqrt(float((da * da).sum()))
    sb = math.sqrt(float((db * db).sum()))
    if sa == 0.0 or sb == 0.0:
        raise UndefinedMetricError("spearman is undefined when a side has all-tied ranks")
    rho = float((da * db).sum()) / (sa * sb)
    rho = max(-1.0, min(1.0, rho))
    z = rho * math.sqrt(a.size - 1)
    return CorrelationResult(
        rho=rho,
        p_value=_normal_two_sided_p(z),
        strength=correlation_strength(rho),
        n=int(a.size),
    )


@dataclass(frozen=True)
class WilcoxonResult:
    p_value: float
    statistic: float
    n: int
    small_sample: bool = False


def wilcoxon_signed_rank(differences) -> WilcoxonResult:
    """Paired signed-rank test on a vector of differences.

    Zero differences are dropped. With fewer than 6 non-zero differences
    the normal approximation is unusable, so p is reported as 1 with the
    small-sample flag set. The variance carries the tie correction.
    """
    d = np.asarray(differences, dtype=float)
    if d.ndim != 1 or d.size == 0:
        raise ValueError("expected a non-empty 1-d sequence of differences")
    d = d[d != 0.0]
    n = int(d.size)
    if n < MIN_SIGNED_RANK_N:
        return WilcoxonResult(p_value=1.0, statistic=math.nan, n=n, small_sample=True)
    ranks = average_ranks(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    mean = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0
    _, tie_counts = np.unique(np.abs(d), return_counts=True)
    var -= float(np.sum(tie_counts.astype(float) ** 3 - tie_counts)) / 48.0
    if var <= 0.0:
        return WilcoxonResult(p_value=1.0, statistic=w_plus, n=n)
    z = (w_plus - mean) / math.sqrt(var)
    return WilcoxonResult(p_value=_normal_two_sided_p(z), statistic=w_plus, n=n)


def wilcoxon_rank_sum(a, b) -> WilcoxonResult:
    """Unpaired rank-sum test between two samples.

    Below 4 values on either side the approximation is unusable and p is
    reported as 1 with the small-sample flag set.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 1 or b.ndim != 1 or a.size == 0 or b.size == 0:
        raise ValueError("both samples must be non-empty 1-d sequences")
    n1, n2 = int(a.size), int(b.size)
    if min(n1, n2) < MIN_RANK_SUM_N:
        return WilcoxonResult(p_value=1.0, statistic=math.nan, n=n1 + n2, small_sample=True)
    pooled = np.concatenate([a, b])
    ranks = average_ranks(pooled)
    r1 = float(ranks[:n1].sum())
    n = n1 + n2
    mean = n1 * (n + 1) / 2.0
    _, tie_counts = np.unique(pooled, return_counts=True)
    tie_term = float(np.sum(tie_counts.astype(float) ** 3 - tie_counts)) / (n * (n - 1))
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term)
    if var <= 0.0:
        return WilcoxonResult(p_value=1.0, statistic=r1, n=n)
    z = (r1 - mean) / math.sqrt(var)
    return WilcoxonResult(p_value=_normal_two_sided_p(z), statistic=r1, n=n)
