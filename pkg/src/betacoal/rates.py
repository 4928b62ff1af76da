"""Merger rates of the Beta(2-alpha, alpha) coalescent, 1 < alpha < 2.

With b lineages alive, every fixed set of k of them (2 <= k <= b) merges at
rate

    lambda(b, k) = B(k - alpha, b - k + alpha) / B(2 - alpha, alpha),

the integral of p^(k-2) (1-p)^(b-k) against the Beta(2-alpha, alpha)
distribution.  The normalization makes the pair rate lambda(2, 2) exactly 1.
The total merger rate is lambda_b = sum_k C(b,k) lambda(b,k), and the merger
size of the next event has pmf proportional to C(b,k) lambda(b,k).

Everything here is evaluated in log-gamma space; only ratios are
exponentiated, so block counts up to 10^6 stay in range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import betaln, gammaln


@dataclass(frozen=True)
class AlphaParam:
    """Validated coalescent parameter, strictly inside (1, 2)."""

    alpha: float

    def __post_init__(self):
        a = self.alpha
        if not isinstance(a, (int, float)) or isinstance(a, bool):
            raise ValueError(f"alpha must be a real number, got {a!r}")
        a = float(a)
        if not math.isfinite(a) or not (1.0 < a < 2.0):
            raise ValueError(f"alpha must lie strictly in (1, 2), got {a}")
        object.__setattr__(self, "alpha", a)

    @property
    def gamma(self) -> float:
        """Mean lineage loss per merger in the large-n limit, 1/(alpha-1)."""
        return 1.0 / (self.alpha - 1.0)


def alpha_value(alpha) -> float:
    """Accept an AlphaParam or a bare float, return the validated float."""
    if isinstance(alpha, AlphaParam):
        return alpha.alpha
    return AlphaParam(alpha).alpha


def _check_block_count(b) -> int:
    b = int(b)
    if b < 2:
        raise ValueError(f"block count must be >= 2, got {b}")
    return b


def lambda_bk(b: int, k: int, alpha) -> float:
    """Rate at which one specific k-subset of b lineages merges.

    Equals B(k-alpha, b-k+alpha)/B(2-alpha, alpha); computed as the
    exponential of a log-Beta difference.
    """
    a = alpha_value(alpha)
    b = _check_block_count(b)
    k = int(k)
    if k < 2 or k > b:
        raise ValueError(f"merger size k must satisfy 2 <= k <= b, got k={k}, b={b}")
    return float(math.exp(betaln(k - a, b - k + a) - betaln(2.0 - a, a)))


@lru_cache(maxsize=16)
def _total_rate_array_cached(max_b: int, a: float) -> np.ndarray:
    # lam[b] = total merger rate with b blocks, for 0 <= b <= max_b
    # (entries 0 and 1 are 0: nothing can merge).  Built by the exact
    # increment recursion lam_{b+1} = lam_b + Delta_b, Delta_2 = alpha,
    # Delta_{j+1} = Delta_j * (j + alpha - 1)/j, which follows from
    # telescoping the integral representation of lam_b.  All increments
    # are positive, so the cumulative sum is numerically benign.
    lam = np.zeros(max_b + 1)
    if max_b >= 2:
        lam[2] = 1.0
    if max_b >= 3:
        deltas = np.empty(max_b - 2)
        deltas[0] = a
        if max_b >= 4:
            j = np.arange(2.0, max_b - 1.0)
            np.cumprod((j + a - 1.0) / j, out=deltas[1:])
            deltas[1:] *= a
        lam[3:] = 1.0 + np.cumsum(deltas)
    lam.setflags(write=False)
    return lam


def total_rate_array(max_b: int, alpha) -> np.ndarray:
    """Total merger rates for every block count up to max_b, as a read-only array.

    lam[b] is the rate at which *some* merger happens among b blocks.
    Computing the whole table costs O(max_b), so simulations index into one
    shared array instead of re-summing per visited block count.
    """
    a = alpha_value(alpha)
    max_b = _check_block_count(max_b)
    return _total_rate_array_cached(max_b, a)


def total_rate(b: int, alpha) -> float:
    """Total merger rate lambda_b = sum_k C(b,k) lambda(b,k)."""
    b = _check_block_count(b)
    return float(total_rate_array(b, alpha)[b])


def asymptotic_rate(m: int, alpha) -> float:
    """Leading-order total rate m^alpha / (alpha * Gamma(alpha)).

    The relative error of total_rate against this decays like 1/m.
    """
    a = alpha_value(alpha)
    m = _check_block_count(m)
    return m ** a / (a * math.gamma(a))


@dataclass(frozen=True)
class MergerRateTable:
    """All merger rates for a fixed block count b.

    sizes[i] = k runs over 2..b; subset_rates[i] = lambda(b, k) is the rate
    per specific k-subset; weighted_rates[i] = C(b,k) * lambda(b, k); and
    size_pmf[i] = weighted_rates[i] / total_rate is the law of the next
    merger's size.
    """

    b: int
    alpha: float
    sizes: np.ndarray = field(repr=False)
    subset_rates: np.ndarray = field(repr=False)
    weighted_rates: np.ndarray = field(repr=False)
    size_pmf: np.ndarray = field(repr=False)
    total_rate: float = 0.0

    def subset_rate(self, k: int) -> float:
        return float(self.subset_rates[int(k) - 2])

    def pmf(self, k: int) -> float:
        return float(self.size_pmf[int(k) - 2])


@lru_cache(maxsize=64)
def _merger_rate_table_cached(b: int, a: float) -> MergerRateTable:
    k = np.arange(2, b + 1)
    log_subset = betaln(k - a, b - k + a) - betaln(2.0 - a, a)
    log_comb = gammaln(b + 1.0) - gammaln(k + 1.0) - gammaln(b - k + 1.0)
    subset = np.exp(log_subset)
    weighted = np.exp(log_subset + log_comb)
    total = float(weighted.sum())
    pmf = weighted / total
    for arr in (k, subset, weighted, pmf):
        arr.setflags(write=False)
    return MergerRateTable(b=b, alpha=a, sizes=k, subset_rates=subset,
                           weighted_rates=weighted, size_pmf=pmf, total_rate=total)


def merger_rate_table(b: int, alpha) -> MergerRateTable:
    """Memoized per-b rate table (bounded cache keyed on (b, alpha))."""
    a = alpha_value(alpha)
    b = _check_block_count(b)
    return _merger_rate_table_cached(b, a)


def first_size_weight(b: int, alpha) -> float:
    """C(b,2) * lambda(b,2), the k=2 term of the weighted rate sum.

    Seed of the inverse-transform walk in sample_merger_size: later terms
    follow from the ratio recurrence
        t_{k+1}/t_k = (b-k)(k-alpha) / ((k+1)(b-k-1+alpha)).
    """
    a = alpha_value(alpha)
    b = _check_block_count(b)
    log_t2 = math.log(b * (b - 1) / 2.0) + betaln(2.0 - a, b - 2.0 + a) - betaln(2.0 - a, a)
    return float(math.exp(log_t2))


def first_size_weight_array(max_b: int, alpha) -> np.ndarray:
    """first_size_weight for every b up to max_b (vectorized, for hot loops)."""
    a = alpha_value(alpha)
    max_b = _check_block_count(max_b)
    out = np.zeros(max_b + 1)
    b = np.arange(2.0, max_b + 1.0)
    out[2:] = np.exp(np.log(b * (b - 1.0) / 2.0) + betaln(2.0 - a, b - 2.0 + a) - betaln(2.0 - a, a))
    out.setflags(write=False)
    return out


def size_walk(b: int, a: float, t2: float, target: float) -> int:
    """Inverse-transform walk over merger sizes.

    Accumulates the weighted terms t_k = C(b,k) lambda(b,k) starting from
    t_2 = t2, stepping with the ratio recurrence until the running sum
    passes ``target`` (a uniform draw times lambda_b).  The pmf piles its
    mass on small k, so the expected number of steps is O(1) in b.
    """
    t = t2
    acc = t
    k = 2
    while target > acc and k < b:
        t *= (b - k) * (k - a) / ((k + 1) * (b - k - 1 + a))
        acc += t
        k += 1
    return k


def sample_merger_size(b: int, alpha, rng: np.random.Generator) -> int:
    """Draw the size of the next merger among b blocks from size_pmf."""
    a = alpha_value(alpha)
    b = _check_block_count(b)
    if b == 2:
        return 2
    lam = total_rate(b, a)
    t2 = first_size_weight(b, a)
    return size_walk(b, a, t2, rng.random() * lam)
