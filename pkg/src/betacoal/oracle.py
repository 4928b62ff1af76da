"""Partition-level simulator used as an independent check on the chain.

Tracks the full labelled partition: the holding time at b blocks is
exponential with the total merger rate, the merger size k is drawn from the
size distribution, the participating blocks are a uniform k-subset, and
they fuse into one block placed at the position of the smallest
participating label.  The block-count sequence then has the law of the
block-counting chain, and the singleton-count sequence has the law of the
thinned external process; both facts are exercised by distributional tests.

This implementation is deliberately simple and allocation-heavy; it exists
to validate the fast samplers at small n, not to be fast itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import sequential_weighted_time
from .rates import alpha_value, merger_rate_table


@dataclass
class PartitionState:
    """A labelled partition at a point in the merger sequence.

    ``blocks`` lists each block as a sorted tuple of original labels
    (1 through n); ``time`` is the cumulative coalescent time at which
    this state was entered.
    """

    blocks: list[tuple[int, ...]]
    time: float

    @property
    def block_count(self) -> int:
        return len(self.blocks)


@dataclass
class OracleRun:
    """Full history of a partition-level realization plus its summary.

    ``x`` and ``y`` are the block counts and singleton counts along the
    history (length tau+1); ``L`` and ``ell`` are the total and external
    branch lengths.
    """

    history: list[PartitionState]
    tau: int
    L: float
    ell: float
    x: np.ndarray
    y: np.ndarray


def external_count(state: PartitionState) -> int:
    """Number of singleton blocks in the partition."""
    return sum(1 for blk in state.blocks if len(blk) == 1)


def _uniform_k_subset(b: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Sorted uniform k-subset of range(b) by a partial shuffle."""
    pool = np.arange(b)
    for i in range(k):
        j = i + int(rng.integers(b - i))
        pool[i], pool[j] = pool[j], pool[i]
    chosen = pool[:k]
    chosen.sort()
    return chosen


def simulate_partition(n: int, alpha, rng: np.random.Generator) -> OracleRun:
    """Run the labelled-partition coalescent from n singletons to one block.

    Each step samples the holding time from the exact total rate, the
    merger size from the exact size distribution at the current block
    count, and the participants as a uniform subset.  Practical for small
    n (roughly n <= 1000); the fast path covers everything larger.
    """
    a = alpha_value(alpha)
    n = int(n)
    if n < 1:
        raise ValueError(f"need at least one lineage, got n={n}")
    state = PartitionState(blocks=[(i,) for i in range(1, n + 1)], time=0.0)
    history = [state]
    while state.block_count > 1:
        b = state.block_count
        table = merger_rate_table(b, a)
        t = state.time + rng.standard_exponential() / table.total_rate
        if b == 2:
            k = 2
        else:
            # invert the size pmf through its cumulative sum
            cum = np.cumsum(table.size_pmf)
            idx = int(np.searchsorted(cum, rng.random(), side="right"))
            k = int(table.sizes[min(idx, len(cum) - 1)])
        chosen = _uniform_k_subset(b, k, rng)
        merged: list[int] = []
        for idx2 in chosen:
            merged.extend(state.blocks[idx2])
        chosen_set = set(chosen.tolist())
        keep = [blk for i, blk in enumerate(state.blocks) if i not in chosen_set]
        keep.insert(int(chosen[0]), tuple(sorted(merged)))
        state = PartitionState(blocks=keep, time=t)
        history.append(state)
    x = np.array([h.block_count for h in history], dtype=np.int64)
    y = np.array([external_count(h) for h in history], dtype=np.int64)
    times = np.array([h.time for h in history], dtype=np.float64)
    tau = len(history) - 1
    if tau:
        dts = np.diff(times)
        total = sequential_weighted_time(x[:-1], dts)
        ell = sequential_weighted_time(y[:-1], dts)
    else:
        total = 0.0
        ell = 0.0
    return OracleRun(history=history, tau=tau, L=total, ell=ell, x=x, y=y)
