"""Deterministic random-stream derivation.

Every replicate gets its own counter-based substreams so that results are
bit-reproducible no matter how replicates are scheduled across workers.

Derivation (fixed; changing it changes every simulated number):

    SeedSequence(entropy=master_seed, spawn_key=(namespace, replicate_index))

seeds a Philox counter-based generator per role.  A replicate uses two roles,
spawned in order from that SeedSequence: child 0 drives the block-counting
chain (holding times and merger sizes), child 1 drives the hypergeometric
thinning.  Keeping the roles on separate streams makes the chain's draws
independent of whether thinning runs interleaved (streaming mode) or as a
second pass over a stored trajectory, so both storage policies produce
identical numbers.

``namespace`` separates seed universes inside one experiment, e.g. the levels
of an n-grid, or the stable-sampler reference draws used by KS comparisons.
"""

from __future__ import annotations

import numpy as np

# Namespaces used by the harness. Level i of an n-grid uses namespace i;
# auxiliary draws sit far away to avoid ever colliding with a grid level.
NS_REFERENCE = 1 << 20


def replicate_seed(master_seed: int, namespace: int, replicate: int) -> int:
    """64-bit audit token identifying one replicate's seed material.

    Recorded in per-replicate output so a run can be traced back to
    (master seed, namespace, replicate index).  Not itself fed to a
    generator; streams come from substreams() below.
    """
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(namespace, replicate))
    return int(ss.generate_state(1, np.uint64)[0])


def substreams(master_seed: int, namespace: int, replicate: int, count: int = 2) -> list[np.random.Generator]:
    """Independent Philox generators for one replicate, in fixed role order."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(namespace, replicate))
    return [np.random.Generator(np.random.Philox(child)) for child in ss.spawn(count)]


def single_stream(seed: int) -> np.random.Generator:
    """One Philox generator straight from a user-facing seed (CLI helpers)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy=seed)))
