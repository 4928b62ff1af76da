"""Simulation toolkit for Beta(2-alpha, alpha) multiple-merger coalescents, 1 < alpha < 2.

Core pieces:

* ``rates``     -- exact merger rates and merger-size sampling
* ``chain``     -- the block-counting Markov chain (lineage counts, holding times)
* ``external``  -- hypergeometric thinning of external branches, branch lengths
* ``oracle``    -- brute-force partition-valued simulator (small-n ground truth)
* ``stable``    -- the matched maximally-skewed alpha-stable law and the
                   normalizing transforms for the limit-law experiments
* ``stats``     -- KS test, sample summaries, tail-index estimation
* ``harness``   -- seeded replicate batches, experiments, CSV/JSON emission
"""

from .rates import AlphaParam, MergerRateTable, asymptotic_rate, lambda_bk, merger_rate_table, sample_merger_size, total_rate
from .chain import ChainSummary, ChainTrajectory, simulate_chain, tau_summary
from .external import ExternalTrajectory, branch_lengths, conditional_expected_externals, pi_product, sample_hypergeometric, thin_external
from .oracle import OracleRun, PartitionState, external_count, simulate_partition
from .stable import LimitConstants, StableSpec, limit_constants, normalize_external, normalize_tau, normalize_total, sample_stable, sample_stable_block, stable_scale, stable_spec, tau_limit_scale, total_limit_scale
from .stats import SampleSummary, ks_two_sample, summarize, tail_index
from .harness import ExperimentConfig, ReplicateBatch, emit, run_experiment

__version__ = "0.1.0"

__all__ = [
    "AlphaParam",
    "ChainSummary",
    "ChainTrajectory",
    "ExperimentConfig",
    "ExternalTrajectory",
    "LimitConstants",
    "MergerRateTable",
    "OracleRun",
    "PartitionState",
    "ReplicateBatch",
    "SampleSummary",
    "StableSpec",
    "asymptotic_rate",
    "branch_lengths",
    "conditional_expected_externals",
    "emit",
    "external_count",
    "ks_two_sample",
    "lambda_bk",
    "limit_constants",
    "merger_rate_table",
    "normalize_external",
    "normalize_tau",
    "normalize_total",
    "pi_product",
    "run_experiment",
    "sample_hypergeometric",
    "sample_merger_size",
    "sample_stable",
    "sample_stable_block",
    "simulate_chain",
    "simulate_partition",
    "stable_scale",
    "stable_spec",
    "summarize",
    "tail_index",
    "tau_limit_scale",
    "tau_summary",
    "thin_external",
    "total_limit_scale",
    "total_rate",
]
