"""Statistical utilities turning the limit laws into automated checks.

Everything here is deliberately small and explicit: order-statistics
summaries with a fixed quantile rule, a two-sample Kolmogorov-Smirnov
statistic with the classical asymptotic p-value, and a Hill-type estimate
of the lower-tail index.  The p-value is approximate by design; hard
acceptance thresholds are placed on the D statistic directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

QUANTILE_LEVELS = (0.01, 0.25, 0.50, 0.75, 0.99)


@dataclass(frozen=True)
class SampleSummary:
    """Moment and order statistics of one sample.

    Quantiles use the lower-nearest rule: the p-quantile of a sorted
    sample s of size m is s[max(0, ceil(p*m) - 1)].  The rule is exact on
    order statistics (no interpolation), hence reproducible across
    languages and libraries.
    """

    count: int
    mean: float
    variance: float
    standard_error: float
    q01: float
    q25: float
    q50: float
    q75: float
    q99: float
    minimum: float
    maximum: float

    @property
    def quantiles(self) -> dict[float, float]:
        return dict(zip(QUANTILE_LEVELS, (self.q01, self.q25, self.q50, self.q75, self.q99)))


def quantile_lower_nearest(sorted_values: np.ndarray, p: float) -> float:
    """The lower-nearest p-quantile of an already sorted array."""
    m = len(sorted_values)
    if m == 0:
        raise ValueError("empty sample")
    idx = max(0, math.ceil(p * m) - 1)
    return float(sorted_values[idx])


def summarize(samples) -> SampleSummary:
    """Full summary of a non-empty sample."""
    arr = np.asarray(samples, dtype=np.float64).ravel()
    m = len(arr)
    if m == 0:
        raise ValueError("cannot summarize an empty sample")
    s = np.sort(arr)
    mean = float(arr.mean())
    variance = float(arr.var(ddof=1)) if m > 1 else 0.0
    return SampleSummary(
        count=m,
        mean=mean,
        variance=variance,
        standard_error=math.sqrt(variance / m),
        q01=quantile_lower_nearest(s, 0.01),
        q25=quantile_lower_nearest(s, 0.25),
        q50=quantile_lower_nearest(s, 0.50),
        q75=quantile_lower_nearest(s, 0.75),
        q99=quantile_lower_nearest(s, 0.99),
        minimum=float(s[0]),
        maximum=float(s[-1]),
    )


def _kolmogorov_sf(lam: float) -> float:
    """P(sup |Brownian bridge| > lam): 2 sum (-1)^(j-1) exp(-2 j^2 lam^2).

    Truncated at 100 terms; below lam ~ 0.02 the truncated alternating sum
    is meaningless, and the true value is 1 to far more digits than any
    consumer here needs, so that is returned directly.
    """
    if lam <= 0.02:
        return 1.0
    j = np.arange(1, 101, dtype=np.float64)
    terms = np.exp(-2.0 * j * j * lam * lam)
    terms[1::2] *= -1.0
    return float(min(1.0, max(0.0, 2.0 * terms.sum())))


def ks_two_sample(a, b) -> tuple[float, float]:
    """Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.

    D is the exact sup-distance between the two empirical distribution
    functions over the merged support; the p-value evaluates the limiting
    Kolmogorov law at sqrt(n1*n2/(n1+n2)) * D and is approximate for
    finite samples.
    """
    xa = np.sort(np.asarray(a, dtype=np.float64).ravel())
    xb = np.sort(np.asarray(b, dtype=np.float64).ravel())
    n1, n2 = len(xa), len(xb)
    if n1 == 0 or n2 == 0:
        raise ValueError("both samples must be non-empty")
    support = np.concatenate([xa, xb])
    cdf_a = np.searchsorted(xa, support, side="right") / n1
    cdf_b = np.searchsorted(xb, support, side="right") / n2
    d = float(np.abs(cdf_a - cdf_b).max())
    n_eff = n1 * n2 / (n1 + n2)
    return d, _kolmogorov_sf(math.sqrt(n_eff) * d)


def tail_index(samples, tail_fraction: float) -> float:
    """Hill-type estimate of the lower-tail power index.

    Uses the k = floor(tail_fraction * size) most negative observations
    against the magnitude of the next order statistic as threshold; the
    estimate is the reciprocal mean log-excess.  For a law with
    P(X < -x) ~ c x^(-idx) the estimate is consistent for idx as the
    sample grows and the fraction shrinks.  For light-tailed input the
    log-excesses collapse and the estimate drifts upward; that is the
    expected reading, not an error.
    """
    arr = np.asarray(samples, dtype=np.float64).ravel()
    m = len(arr)
    if m < 100:
        raise ValueError(f"need at least 100 samples for a tail estimate, got {m}")
    frac = float(tail_fraction)
    if not 0.0 < frac < 0.5:
        raise ValueError(f"tail fraction must lie strictly between 0 and 0.5, got {frac}")
    k = int(frac * m)
    if k < 1:
        raise ValueError(f"tail fraction {frac} selects no observations out of {m}")
    s = np.sort(arr)
    threshold = s[k]
    if threshold >= 0.0:
        raise ValueError("lower tail is not negative; no power-law index to estimate")
    excess = np.log(s[:k] / threshold)
    mean_excess = float(excess.mean())
    if mean_excess <= 0.0:
        return math.inf
    return 1.0 / mean_excess
