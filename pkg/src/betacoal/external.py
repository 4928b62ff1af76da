"""External branches via hypergeometric thinning of the block-counting chain.

Y_k counts the lineages still in singleton blocks after k mergers.  Given
the chain, a merger of U_k blocks out of X_{k-1} absorbs

    H_k ~ Hyp(population X_{k-1}, marked Y_{k-1}, draws U_k)

singletons, and Y_k = Y_{k-1} - H_k.  The two branch-length functionals are
the time-weighted sums L = sum X_k dt_k (all branches) and
ell = sum Y_k dt_k (external branches only).

The merged block is never a singleton, so after the first merger Y < X holds
until both end at (X, Y) = (1, 0); the final merger always absorbs every
remaining singleton.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import ChainTrajectory, sequential_weighted_time
from .rates import alpha_value


@dataclass
class ExternalTrajectory:
    """Singleton counts y (length tau+1), absorbed counts h (length tau),
    and the two branch lengths of the realization."""

    y: np.ndarray
    h: np.ndarray
    ell: float
    L: float


def sample_hypergeometric(population: int, marked: int, draws: int, rng: np.random.Generator) -> int:
    """One exact draw of the number of marked items among ``draws`` taken
    without replacement from ``population`` items of which ``marked`` are
    marked.

    Parameter order is (population N, marked M, draws nu).  Degenerate
    cases short-circuit; everything else goes to numpy's exact
    hypergeometric sampler (urn simulation for small draw counts, exact
    ratio-of-uniforms rejection for large ones).
    """
    population = int(population)
    marked = int(marked)
    draws = int(draws)
    if population < 0 or not (0 <= marked <= population) or not (0 <= draws <= population):
        raise ValueError(
            f"inconsistent hypergeometric parameters: population={population}, marked={marked}, draws={draws}")
    if marked == 0 or draws == 0:
        return 0
    if marked == population:
        return draws
    return int(rng.hypergeometric(marked, population - marked, draws))


def thin_external(chain: ChainTrajectory, rng: np.random.Generator) -> ExternalTrajectory:
    """Run the hypergeometric thinning along a stored chain.

    Consumes one hypergeometric variate per merger (skipping steps whose
    outcome is forced), in merger order; the streaming path in the harness
    consumes the identical sequence.
    """
    if not chain.stored:
        raise ValueError("thin_external needs a stored trajectory (store_trajectory=True)")
    tau = chain.tau
    x = chain.x
    u = chain.u
    y = np.empty(tau + 1, dtype=np.int64)
    h = np.empty(tau, dtype=np.int64)
    yk = chain.n
    y[0] = yk
    for k in range(tau):
        absorbed = sample_hypergeometric(int(x[k]), yk, int(u[k]), rng)
        yk -= absorbed
        h[k] = absorbed
        y[k + 1] = yk
    ell = sequential_weighted_time(y[:-1], chain.dt) if tau else 0.0
    total = sequential_weighted_time(x[:-1], chain.dt) if tau else 0.0
    return ExternalTrajectory(y=y, h=h, ell=ell, L=total)


def branch_lengths(chain: ChainTrajectory, ext: ExternalTrajectory) -> tuple[float, float]:
    """(L, ell) recomputed from matching chain and thinning trajectories."""
    if not chain.stored:
        raise ValueError("branch_lengths needs a stored chain trajectory")
    if len(ext.y) != chain.tau + 1 or len(ext.h) != chain.tau:
        raise ValueError(
            f"mismatched trajectories: chain has tau={chain.tau}, "
            f"thinning has {len(ext.y)} counts / {len(ext.h)} absorptions")
    if chain.tau == 0:
        return 0.0, 0.0
    total = sequential_weighted_time(chain.x[:-1], chain.dt)
    ell = sequential_weighted_time(ext.y[:-1], chain.dt)
    return total, ell


def pi_product(chain: ChainTrajectory, j: int, k: int) -> float:
    """prod_{i=j+1}^{k} (1 - 1/X_i) for 0 <= j <= k <= tau-1; 1 when j == k.

    Indices stop before the absorbing state: every factor needs X_i >= 2.
    Accumulated as a sum of log1p terms so long products lose no accuracy.
    """
    if not chain.stored:
        raise ValueError("pi_product needs a stored trajectory")
    j = int(j)
    k = int(k)
    if not (0 <= j <= k <= chain.tau - 1):
        raise ValueError(
            f"need 0 <= j <= k <= tau-1 = {chain.tau - 1} (every factor must have X >= 2); got j={j}, k={k}")
    if j == k:
        return 1.0
    segment = chain.x[j + 1:k + 1].astype(np.float64)
    return float(np.exp(np.log1p(-1.0 / segment).sum()))


def conditional_expected_externals(chain: ChainTrajectory) -> np.ndarray:
    """The sequence X_k * prod_{i<=k}(1 - 1/X_i) for k = 0..tau-1.

    This is the conditional mean of Y_k given the whole chain; computed
    incrementally in O(tau).  Empty for tau = 0.
    """
    if not chain.stored:
        raise ValueError("conditional_expected_externals needs a stored trajectory")
    tau = chain.tau
    if tau == 0:
        return np.empty(0)
    x = chain.x[:tau].astype(np.float64)
    # cumulative product over i = 1..k; the k = 0 product is empty
    logs = np.concatenate(([0.0], np.log1p(-1.0 / x[1:]).cumsum()))
    return x * np.exp(logs)
