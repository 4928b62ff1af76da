"""Replicate orchestration: seeded experiment batches and their emission.

An experiment runs many independent coalescent replicates, derives the
statistic its limit law concerns, and packages records, summaries, and
(two-sample) comparisons against the matched stable reference into one
ReplicateBatch.  Batches serialize to CSV or JSON; identical configuration
and master seed produce identical bytes no matter how many workers ran.

Experiment ids and what they measure:

* ``lemma1``    normalized merger count (tau - n(alpha-1)) / n^(1/alpha),
                compared by KS against the scaled stable reference
* ``theorem1``  normalized external length, compared against the reference
* ``theorem2``  normalized or centered total length, regime-tagged by the
                golden-ratio threshold; KS only in the rescaled regimes
* ``theorem3``  per-replicate maximal deviation of the lineage-count and
                singleton-count profiles from their limiting curves
* ``lemma2``    residual of the external length around its merger-count
                predictor, rescaled by the diagnostic power of n
* ``fig1``      per-replicate scatter triples (ell, L, tau^(2-alpha))
* ``fig2``      one trajectory's profile table with the reference curve
* ``ratio``     per-replicate ell/L

Replicates are independent tasks; each derives its own counter-based
random streams from (master seed, namespace, replicate index), so results
do not depend on scheduling.  Levels of an n-grid use the grid index as
namespace.  Stable reference draws for KS comparisons use a reserved
namespace far above any grid index.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .chain import chain_steps, simulate_chain
from .external import sample_hypergeometric, thin_external
from .rates import alpha_value
from .rng import NS_REFERENCE, replicate_seed, substreams
from .stable import (
    TOTAL_REGIME_CENTERED,
    limit_constants,
    normalize_external,
    normalize_tau,
    normalize_total,
    sample_stable_block,
    stable_spec,
    tau_limit_scale,
    total_limit_scale,
)
from .stats import SampleSummary, ks_two_sample, summarize

EXPERIMENT_IDS = (
    "theorem1",
    "theorem2",
    "theorem3",
    "lemma1",
    "lemma2",
    "fig1",
    "fig2",
    "ratio",
)

WORKERS_ENV_VAR = "BETACOAL_WORKERS"

# experiments whose statistic needs a stored trajectory per replicate
_NEEDS_TRAJECTORY = ("theorem3", "fig2")
# experiments whose normalizing transform requires n >= 2
_NEEDS_N2 = ("theorem1", "theorem2", "theorem3", "lemma1", "lemma2", "fig2", "ratio")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated description of one experiment run.

    Exactly one of ``n`` and ``n_grid`` must be given.  ``workers`` and
    ``output_path`` do not influence any computed value and are excluded
    from the configuration echo in emitted output.
    """

    experiment: str
    alpha: float
    replicates: int
    master_seed: int
    n: int | None = None
    n_grid: tuple[int, ...] | None = None
    workers: int = 1
    output_path: str | None = None
    storage_policy: str = "auto"

    def __post_init__(self):
        if self.experiment not in EXPERIMENT_IDS:
            raise ValueError(
                f"unknown experiment {self.experiment!r}; choose one of {', '.join(EXPERIMENT_IDS)}")
        object.__setattr__(self, "alpha", alpha_value(self.alpha))
        reps = int(self.replicates)
        if reps < 1:
            raise ValueError(f"replicates must be >= 1, got {reps}")
        object.__setattr__(self, "replicates", reps)
        object.__setattr__(self, "master_seed", int(self.master_seed))
        if self.master_seed < 0:
            raise ValueError(f"master seed must be nonnegative, got {self.master_seed}")
        if (self.n is None) == (self.n_grid is None):
            raise ValueError("exactly one of n and n_grid must be given")
        min_n = 2 if self.experiment in _NEEDS_N2 else 1
        if self.n is not None:
            object.__setattr__(self, "n", self._check_level(self.n, min_n))
        else:
            if self.experiment == "fig2":
                raise ValueError("fig2 runs a single trajectory; give n, not n_grid")
            grid = tuple(self._check_level(v, min_n) for v in self.n_grid)
            if not grid:
                raise ValueError("n_grid must not be empty")
            object.__setattr__(self, "n_grid", grid)
        workers = int(self.workers)
        if workers < 1:
            raise ValueError(f"workers must be >= 1, got {workers}")
        object.__setattr__(self, "workers", workers)
        if self.storage_policy not in ("auto", "summary", "stored"):
            raise ValueError(
                f"storage policy must be auto, summary, or stored, got {self.storage_policy!r}")
        if self.storage_policy == "summary" and self.experiment in _NEEDS_TRAJECTORY:
            raise ValueError(
                f"experiment {self.experiment} needs stored trajectories; summary storage impossible")
        if self.experiment == "fig2" and reps != 1:
            raise ValueError(f"fig2 uses exactly one replicate, got {reps}")

    def _check_level(self, value, min_n: int) -> int:
        v = int(value)
        if v < min_n:
            raise ValueError(
                f"experiment {self.experiment} needs n >= {min_n}, got {v}")
        return v

    @property
    def levels(self) -> tuple[int, ...]:
        return (self.n,) if self.n is not None else self.n_grid

    @property
    def stored_replicates(self) -> bool:
        if self.storage_policy == "stored":
            return True
        if self.storage_policy == "summary":
            return False
        return self.experiment in _NEEDS_TRAJECTORY

    def echo(self) -> dict[str, Any]:
        """The value-determining part of the configuration, for output."""
        out: dict[str, Any] = {"experiment": self.experiment, "alpha": self.alpha}
        if self.n is not None:
            out["n"] = self.n
        else:
            out["n_grid"] = list(self.n_grid)
        out["replicates"] = self.replicates
        out["master_seed"] = self.master_seed
        out["storage_policy"] = self.storage_policy
        return out


@dataclass
class ReplicateBatch:
    """Everything one experiment run produced.

    ``records`` has one dict per replicate (per grid level), in level-major
    replicate order.  ``aggregates`` maps statistic names to summaries;
    grid runs suffix names with ``@n=<level>``.  ``ks`` maps comparison
    names to {d, p_value, reference_count}.  ``table`` carries fig2's
    per-step profile; ``regime`` carries theorem2's tag.
    """

    config: dict[str, Any]
    records: list[dict[str, Any]]
    aggregates: dict[str, SampleSummary]
    ks: dict[str, dict[str, float]] = field(default_factory=dict)
    table: dict[str, Any] | None = None
    regime: str | None = None


def _stream_summary(n: int, a: float, chain_rng, thin_rng) -> tuple[int, float, float]:
    """One replicate without storing trajectories: (tau, L, ell).

    Accumulates the time-weighted sums step by step in the same order as
    the stored path, so both storage policies agree bit for bit.
    """
    tau = 0
    total = 0.0
    ell = 0.0
    y = n
    for b, k, dt in chain_steps(n, a, chain_rng):
        total += b * dt
        ell += y * dt
        y -= sample_hypergeometric(b, y, k, thin_rng)
        tau += 1
    return tau, total, ell


def _stored_summary(n: int, a: float, chain_rng, thin_rng) -> tuple[int, float, float]:
    """Same statistics as _stream_summary via stored trajectories."""
    chain = simulate_chain(n, a, chain_rng, store_trajectory=True)
    ext = thin_external(chain, thin_rng)
    return chain.tau, ext.L, ext.ell


def _profile_deviations(n: int, a: float, chain_rng, thin_rng) -> tuple[int, float, float, float, float]:
    """(tau, L, ell, dev_x, dev_y) for one stored replicate.

    dev_x is the largest deviation of the lineage-count profile from the
    straight line j/tau; dev_y the largest deviation of the singleton
    profile from (j/tau)^alpha, both over j = 1..tau in root-to-leaves
    orientation.
    """
    chain = simulate_chain(n, a, chain_rng, store_trajectory=True)
    ext = thin_external(chain, thin_rng)
    tau = chain.tau
    j = np.arange(1, tau + 1, dtype=np.float64)
    frac = j / tau
    x_rev = chain.x[::-1][1:].astype(np.float64)
    y_rev = ext.y[::-1][1:].astype(np.float64)
    dev_x = float(np.abs(x_rev / n - frac).max())
    dev_y = float(np.abs(y_rev / n - frac**a).max())
    return tau, ext.L, ext.ell, dev_x, dev_y


def _run_replicate(task: tuple) -> tuple:
    """Worker entry point: one replicate, identified by its task tuple."""
    kind, n, a, master_seed, namespace, replicate = task
    chain_rng, thin_rng = substreams(master_seed, namespace, replicate)
    token = replicate_seed(master_seed, namespace, replicate)
    if kind == "deviation":
        tau, total, ell, dev_x, dev_y = _profile_deviations(n, a, chain_rng, thin_rng)
        return replicate, token, tau, total, ell, dev_x, dev_y
    if kind == "stored":
        tau, total, ell = _stored_summary(n, a, chain_rng, thin_rng)
    else:
        tau, total, ell = _stream_summary(n, a, chain_rng, thin_rng)
    return replicate, token, tau, total, ell


def _execute_level(config: ExperimentConfig, kind: str, namespace: int, n: int, workers: int) -> list[tuple]:
    tasks = [
        (kind, n, config.alpha, config.master_seed, namespace, r)
        for r in range(config.replicates)
    ]
    if workers == 1:
        return [_run_replicate(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_replicate, tasks, chunksize=chunk))


def _reference_draws(config: ExperimentConfig, level_index: int, count: int, scale: float) -> np.ndarray:
    """Matched stable reference sample for a KS comparison.

    Drawn from a reserved namespace so reference draws never collide with
    replicate streams; the level index picks the substream.
    """
    rng = substreams(config.master_seed, NS_REFERENCE, level_index, count=1)[0]
    spec = stable_spec(config.alpha)
    return scale * sample_stable_block(spec, rng, count)


def _level_suffix(config: ExperimentConfig, n: int) -> str:
    return "" if config.n is not None else f"@n={n}"


def run_experiment(config: ExperimentConfig) -> ReplicateBatch:
    """Run all replicates of the configured experiment and aggregate.

    The worker count may be overridden by the BETACOAL_WORKERS environment
    variable; neither value affects any emitted number.
    """
    workers = config.workers
    env_workers = os.environ.get(WORKERS_ENV_VAR)
    if env_workers is not None:
        workers = max(1, int(env_workers))

    if config.experiment == "fig2":
        return _run_fig2(config)

    a = config.alpha
    if config.experiment == "theorem3":
        kind = "deviation"
    elif config.stored_replicates:
        kind = "stored"
    else:
        kind = "stream"

    records: list[dict[str, Any]] = []
    aggregates: dict[str, SampleSummary] = {}
    ks: dict[str, dict[str, float]] = {}
    regime: str | None = None

    for level_index, n in enumerate(config.levels):
        rows = _execute_level(config, kind, level_index, n, workers)
        taus = np.array([row[2] for row in rows], dtype=np.float64)
        totals = np.array([row[3] for row in rows], dtype=np.float64)
        ells = np.array([row[4] for row in rows], dtype=np.float64)
        level_records = [
            {"replicate": row[0], "seed": row[1], "n": n,
             "tau": row[2], "L": row[3], "ell": row[4]}
            for row in rows
        ]
        suffix = _level_suffix(config, n)

        if config.experiment == "fig1":
            tau_pow = taus ** (2.0 - a)
            for rec, tp in zip(level_records, tau_pow):
                rec["tau_pow"] = float(tp)
            aggregates["ell" + suffix] = summarize(ells)
            aggregates["L" + suffix] = summarize(totals)
            aggregates["tau_pow" + suffix] = summarize(tau_pow)
        elif config.experiment == "ratio":
            ratios = ells / totals
            for rec, rv in zip(level_records, ratios):
                rec["ratio"] = float(rv)
            aggregates["ratio" + suffix] = summarize(ratios)
        elif config.experiment == "lemma1":
            norm = normalize_tau(taus, n, a)
            for rec, v in zip(level_records, norm):
                rec["tau_norm"] = float(v)
            aggregates["tau_norm" + suffix] = summarize(norm)
            ref = _reference_draws(config, level_index, config.replicates, tau_limit_scale(a))
            d, p = ks_two_sample(norm, ref)
            ks["tau_norm_vs_reference" + suffix] = {
                "d": d, "p_value": p, "reference_count": len(ref)}
        elif config.experiment == "theorem1":
            norm = normalize_external(ells, n, a)
            for rec, v in zip(level_records, norm):
                rec["ell_norm"] = float(v)
            aggregates["ell_norm" + suffix] = summarize(norm)
            ref = _reference_draws(config, level_index, config.replicates, limit_constants(a).c2)
            d, p = ks_two_sample(norm, ref)
            ks["ell_norm_vs_reference" + suffix] = {
                "d": d, "p_value": p, "reference_count": len(ref)}
        elif config.experiment == "theorem2":
            norm, regime = normalize_total(totals, n, a)
            for rec, v in zip(level_records, norm):
                rec["L_norm"] = float(v)
            aggregates["L_norm" + suffix] = summarize(norm)
            if regime != TOTAL_REGIME_CENTERED:
                ref = _reference_draws(config, level_index, config.replicates, total_limit_scale(a))
                d, p = ks_two_sample(norm, ref)
                ks["L_norm_vs_reference" + suffix] = {
                    "d": d, "p_value": p, "reference_count": len(ref)}
        elif config.experiment == "theorem3":
            dev_x = np.array([row[5] for row in rows], dtype=np.float64)
            dev_y = np.array([row[6] for row in rows], dtype=np.float64)
            for rec, dx, dy in zip(level_records, dev_x, dev_y):
                rec["dev_x"] = float(dx)
                rec["dev_y"] = float(dy)
            aggregates["dev_x" + suffix] = summarize(dev_x)
            aggregates["dev_y" + suffix] = summarize(dev_y)
        elif config.experiment == "lemma2":
            predictor = a * math.gamma(a) * (a - 1.0) ** (a - 1.0) * taus ** (2.0 - a)
            residual = ells - predictor
            power = max(2.0 / a - a, 1.5 - a) + 0.1
            scaled = residual / float(n) ** power
            for rec, rv, sv in zip(level_records, residual, scaled):
                rec["residual"] = float(rv)
                rec["residual_scaled"] = float(sv)
            aggregates["residual_scaled" + suffix] = summarize(scaled)
            aggregates["residual_scaled_abs" + suffix] = summarize(np.abs(scaled))
        records.extend(level_records)

    return ReplicateBatch(
        config=config.echo(),
        records=records,
        aggregates=aggregates,
        ks=ks,
        regime=regime,
    )


def _run_fig2(config: ExperimentConfig) -> ReplicateBatch:
    """One stored trajectory plus its profile table with the reference curve."""
    n = config.n
    a = config.alpha
    chain_rng, thin_rng = substreams(config.master_seed, 0, 0)
    token = replicate_seed(config.master_seed, 0, 0)
    chain = simulate_chain(n, a, chain_rng, store_trajectory=True)
    ext = thin_external(chain, thin_rng)
    tau = chain.tau
    j = np.arange(0, tau + 1, dtype=np.int64)
    x_of_j = chain.x[::-1]
    y_of_j = ext.y[::-1]
    ref = n * (j / tau) ** a
    rows = [
        [int(jj), int(xx), int(yy), float(rr)]
        for jj, xx, yy, rr in zip(j, x_of_j, y_of_j, ref)
    ]
    record = {"replicate": 0, "seed": token, "n": n,
              "tau": tau, "L": ext.L, "ell": ext.ell}
    return ReplicateBatch(
        config=config.echo(),
        records=[record],
        aggregates={},
        table={"columns": ["j", "x", "y", "ref_curve"], "rows": rows},
    )


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _batch_csv(batch: ReplicateBatch) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL)
    if batch.table is not None:
        writer.writerow(batch.table["columns"])
        for row in batch.table["rows"]:
            writer.writerow(_format_cell(v) for v in row)
    else:
        columns = list(batch.records[0].keys()) if batch.records else []
        writer.writerow(columns)
        for rec in batch.records:
            writer.writerow(_format_cell(rec[c]) for c in columns)
    return buf.getvalue()


def _summary_dict(s: SampleSummary) -> dict[str, float]:
    return {
        "count": s.count,
        "mean": s.mean,
        "variance": s.variance,
        "standard_error": s.standard_error,
        "q01": s.q01,
        "q25": s.q25,
        "q50": s.q50,
        "q75": s.q75,
        "q99": s.q99,
        "min": s.minimum,
        "max": s.maximum,
    }


def _batch_json(batch: ReplicateBatch) -> str:
    payload: dict[str, Any] = {
        "config": batch.config,
        "records": batch.records,
        "aggregates": {name: _summary_dict(s) for name, s in batch.aggregates.items()},
        "ks": batch.ks,
    }
    if batch.regime is not None:
        payload["regime"] = batch.regime
    if batch.table is not None:
        payload["table"] = batch.table
    return json.dumps(payload, indent=2) + "\n"


def emit(batch: ReplicateBatch, fmt: str = "csv", path: str | None = None) -> str:
    """Serialize a batch to CSV or JSON; optionally persist it.

    Returns the serialized text.  CSV carries the per-replicate records
    (or, for fig2, the profile table) with a header row, minimal RFC-4180
    quoting, and 17-significant-digit reals; JSON carries one top-level
    object with the configuration echo, records, aggregates, and
    comparisons.  Emitting the same batch twice yields identical bytes.
    """
    if fmt == "csv":
        text = _batch_csv(batch)
    elif fmt == "json":
        text = _batch_json(batch)
    else:
        raise ValueError(f"format must be csv or json, got {fmt!r}")
    if path is not None:
        try:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write output to {path}: {exc}") from exc
    return text
