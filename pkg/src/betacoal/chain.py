"""The block-counting chain of the coalescent.

Starting from n lineages, each step waits an exponential holding time with
the current total merger rate, draws a merger size k, and replaces k blocks
by one: b -> b - k + 1.  The chain hits 1 after tau mergers.

Draw discipline (fixed so results are reproducible and identical between
stored and streaming consumers): per step, first one standard exponential
for the holding time, then -- only when more than one merger size is
possible, i.e. b > 2 -- one uniform for the size draw.  Draws are pulled
from the generator in blocks for speed; blocking does not change the
consumed sequence.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .rates import alpha_value, first_size_weight_array, size_walk, total_rate_array

_BLOCK = 8192


@dataclass
class ChainTrajectory:
    """One realization: lineage counts x (length tau+1), merger sizes u and
    holding times dt (length tau).  x[i] - x[i+1] + 1 = u[i] always.

    Streaming simulations keep only the scalars; then x/u/dt are None.
    """

    n: int
    alpha: float
    tau: int
    x: np.ndarray | None
    u: np.ndarray | None
    dt: np.ndarray | None
    seed: int | None = None

    @property
    def stored(self) -> bool:
        return self.x is not None


@dataclass
class ChainSummary:
    """tau plus the time-weighted accumulations downstream code wants."""

    tau: int
    total_length: float
    x: np.ndarray | None
    u: np.ndarray | None
    dt: np.ndarray | None


class _Draws:
    """Blocked scalar draws from one generator (exponentials and uniforms)."""

    __slots__ = ("rng", "_exp", "_ei", "_uni", "_ui")

    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self._exp = rng.standard_exponential(_BLOCK)
        self._ei = 0
        self._uni = rng.random(_BLOCK)
        self._ui = 0

    def exponential(self) -> float:
        i = self._ei
        if i == _BLOCK:
            self._exp = self.rng.standard_exponential(_BLOCK)
            i = 0
        self._ei = i + 1
        return self._exp[i]

    def uniform(self) -> float:
        i = self._ui
        if i == _BLOCK:
            self._uni = self.rng.random(_BLOCK)
            i = 0
        self._ui = i + 1
        return self._uni[i]


@lru_cache(maxsize=8)
def _chain_tables(max_b: int, a: float):
    lam = total_rate_array(max_b, a)
    t2 = first_size_weight_array(max_b, a)
    return lam, t2


def chain_steps(n: int, alpha, rng: np.random.Generator) -> Iterator[tuple[int, int, float]]:
    """Yield (b, k, dt) per merger: b blocks present, k of them merge after
    holding time dt.  Runs until one block remains.  O(1) memory.
    """
    a = alpha_value(alpha)
    n = int(n)
    if n < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")
    if n == 1:
        return
    lam, t2 = _chain_tables(n, a)
    draws = _Draws(rng)
    b = n
    while b >= 2:
        dt = draws.exponential() / lam[b]
        if b == 2:
            k = 2
        else:
            k = size_walk(b, a, t2[b], draws.uniform() * lam[b])
        yield b, k, dt
        b = b - k + 1


def simulate_chain(n: int, alpha, rng: np.random.Generator, *,
                   store_trajectory: bool = True, seed: int | None = None) -> ChainTrajectory:
    """Simulate the block-counting chain from n lineages down to 1.

    With store_trajectory=False only n, alpha and tau are kept (summary
    mode for very large n); the same draws are consumed either way.
    """
    a = alpha_value(alpha)
    n = int(n)
    if n < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")
    if not store_trajectory:
        tau = 0
        for _ in chain_steps(n, a, rng):
            tau += 1
        return ChainTrajectory(n=n, alpha=a, tau=tau, x=None, u=None, dt=None, seed=seed)
    xs = [n]
    us: list[int] = []
    dts: list[float] = []
    for b, k, dt in chain_steps(n, a, rng):
        us.append(k)
        dts.append(dt)
        xs.append(b - k + 1)
    return ChainTrajectory(
        n=n, alpha=a, tau=len(us),
        x=np.asarray(xs, dtype=np.int64),
        u=np.asarray(us, dtype=np.int64),
        dt=np.asarray(dts, dtype=np.float64),
        seed=seed,
    )


def sequential_weighted_time(weights, dt) -> float:
    """sum_i weights[i] * dt[i] accumulated left to right.

    Deliberately a plain sequential sum: streaming simulations accumulate
    the same products in the same order, so stored and streaming paths
    agree to the last bit.
    """
    total = 0.0
    for w, d in zip(weights, dt):
        total += w * d
    return total


def tau_summary(traj: ChainTrajectory) -> ChainSummary:
    """Merger count plus the time-weighted totals of a stored trajectory.

    total_length is sum_k X_k * dt_k, the combined length of all branches
    alive over the run.
    """
    if not traj.stored:
        raise ValueError("tau_summary needs a stored trajectory (store_trajectory=True)")
    total = sequential_weighted_time(traj.x[:-1], traj.dt) if traj.tau else 0.0
    return ChainSummary(tau=traj.tau, total_length=total, x=traj.x, u=traj.u, dt=traj.dt)
