"""Command-line front end.

Subcommands:

* ``rates table``  per-subset rates, binomial weights, and the merger-size
                   pmf at one block count, as CSV on stdout
* ``simulate``     one coalescent replicate as a JSON record
* ``oracle``       partition-level replicates as CSV (optional full history)
* ``stable sample`` draws from the matched stable reference law
* ``constants``    the closed-form limit constants as JSON
* ``experiment``   a full replicate batch, CSV or JSON, stdout or file

All validation failures print a diagnostic to stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .chain import chain_steps, simulate_chain
from .external import sample_hypergeometric, thin_external
from .harness import EXPERIMENT_IDS, ExperimentConfig, emit, run_experiment
from .oracle import simulate_partition
from .rates import alpha_value, merger_rate_table
from .rng import replicate_seed, single_stream, substreams
from .stable import limit_constants, sample_stable_block, stable_spec


def _real(x: float) -> str:
    return format(float(x), ".17g")


def _cmd_rates_table(args) -> int:
    a = alpha_value(args.alpha)
    table = merger_rate_table(args.b, a)
    out = sys.stdout
    out.write("k,lambda_bk,binom_weight,pmf\r\n")
    for k in table.sizes:
        k = int(k)
        out.write("%d,%s,%d,%s\r\n" % (
            k,
            _real(table.subset_rate(k)),
            math.comb(args.b, k),
            _real(table.pmf(k)),
        ))
    return 0


def _cmd_simulate(args) -> int:
    a = alpha_value(args.alpha)
    chain_rng, thin_rng = substreams(args.seed, 0, 0)
    record: dict = {"n": args.n, "alpha": a, "seed": args.seed}
    if args.store_trajectory:
        chain = simulate_chain(args.n, a, chain_rng, store_trajectory=True)
        ext = thin_external(chain, thin_rng)
        record.update(tau=chain.tau, L=ext.L, ell=ext.ell)
        record["x"] = [int(v) for v in chain.x]
        record["u"] = [int(v) for v in chain.u]
        record["dt"] = [float(v) for v in chain.dt]
    else:
        tau = 0
        total = 0.0
        ell = 0.0
        y = args.n
        for b, k, dt in chain_steps(args.n, a, chain_rng):
            total += b * dt
            ell += y * dt
            y -= sample_hypergeometric(b, y, k, thin_rng)
            tau += 1
        record.update(tau=tau, L=float(total), ell=float(ell))
    json.dump(record, sys.stdout)
    sys.stdout.write("\n")
    return 0


def _cmd_oracle(args) -> int:
    a = alpha_value(args.alpha)
    if args.reps < 1:
        raise ValueError(f"reps must be >= 1, got {args.reps}")
    out = sys.stdout
    out.write("replicate,seed,n,tau,L,ell\r\n")
    histories = []
    for r in range(args.reps):
        rng = substreams(args.seed, 0, r, count=1)[0]
        token = replicate_seed(args.seed, 0, r)
        run = simulate_partition(args.n, a, rng)
        out.write("%d,%d,%d,%d,%s,%s\r\n" % (
            r, token, args.n, run.tau, _real(run.L), _real(run.ell)))
        if args.store_history is not None:
            histories.append({
                "replicate": r,
                "seed": token,
                "states": [
                    {"time": float(st.time), "blocks": [list(blk) for blk in st.blocks]}
                    for st in run.history
                ],
            })
    if args.store_history is not None:
        try:
            with open(args.store_history, "w") as fh:
                json.dump({"n": args.n, "alpha": a, "master_seed": args.seed,
                           "replicates": histories}, fh, indent=2)
                fh.write("\n")
        except OSError as exc:
            raise OSError(f"cannot write history to {args.store_history}: {exc}") from exc
    return 0


def _cmd_stable_sample(args) -> int:
    a = alpha_value(args.alpha)
    if args.count < 0:
        raise ValueError(f"count must be nonnegative, got {args.count}")
    rng = single_stream(args.seed)
    draws = sample_stable_block(stable_spec(a), rng, args.count)
    out = sys.stdout
    for v in draws:
        out.write(_real(v))
        out.write("\n")
    return 0


def _cmd_constants(args) -> int:
    cons = limit_constants(args.alpha)
    json.dump({
        "c1": cons.c1,
        "c2": cons.c2,
        "c1_prime": cons.c1_prime,
        "c2_prime": cons.c2_prime,
        "gamma": cons.gamma,
        "alpha0": cons.alpha0,
    }, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _parse_grid(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise ValueError(f"n-grid must be comma-separated integers, got {text!r}") from None


def _cmd_experiment(args) -> int:
    config = ExperimentConfig(
        experiment=args.experiment_id,
        alpha=args.alpha,
        replicates=args.reps,
        master_seed=args.seed,
        n=args.n,
        n_grid=_parse_grid(args.n_grid) if args.n_grid is not None else None,
        workers=args.workers,
        output_path=args.out,
        storage_policy=args.storage,
    )
    batch = run_experiment(config)
    text = emit(batch, fmt=args.format, path=args.out)
    if args.out is None:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="betacoal",
        description="Multiple-merger coalescent simulation and limit-law experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    rates = sub.add_parser("rates", help="rate tables")
    rates_sub = rates.add_subparsers(dest="rates_command", required=True)
    table = rates_sub.add_parser("table", help="per-size rates and pmf at one block count")
    table.add_argument("--alpha", type=float, required=True)
    table.add_argument("--b", type=int, required=True, help="block count")
    table.set_defaults(func=_cmd_rates_table)

    simulate = sub.add_parser("simulate", help="one replicate as JSON")
    simulate.add_argument("--n", type=int, required=True)
    simulate.add_argument("--alpha", type=float, required=True)
    simulate.add_argument("--seed", type=int, required=True)
    simulate.add_argument("--store-trajectory", action="store_true")
    simulate.set_defaults(func=_cmd_simulate)

    oracle = sub.add_parser("oracle", help="partition-level replicates as CSV")
    oracle.add_argument("--n", type=int, required=True)
    oracle.add_argument("--alpha", type=float, required=True)
    oracle.add_argument("--reps", type=int, required=True)
    oracle.add_argument("--seed", type=int, required=True)
    oracle.add_argument("--store-history", metavar="PATH", default=None,
                        help="also write the full partition histories as JSON to PATH")
    oracle.set_defaults(func=_cmd_oracle)

    stable = sub.add_parser("stable", help="reference stable law")
    stable_sub = stable.add_subparsers(dest="stable_command", required=True)
    sample = stable_sub.add_parser("sample", help="draws, one per line")
    sample.add_argument("--alpha", type=float, required=True)
    sample.add_argument("--count", type=int, required=True)
    sample.add_argument("--seed", type=int, required=True)
    sample.set_defaults(func=_cmd_stable_sample)

    constants = sub.add_parser("constants", help="limit constants as JSON")
    constants.add_argument("--alpha", type=float, required=True)
    constants.set_defaults(func=_cmd_constants)

    experiment = sub.add_parser("experiment", help="replicate batch")
    experiment.add_argument("experiment_id", choices=EXPERIMENT_IDS)
    experiment.add_argument("--alpha", type=float, required=True)
    experiment.add_argument("--n", type=int, default=None)
    experiment.add_argument("--n-grid", default=None,
                            help="comma-separated n levels (alternative to --n)")
    experiment.add_argument("--reps", type=int, required=True)
    experiment.add_argument("--seed", type=int, required=True)
    experiment.add_argument("--workers", type=int, default=1)
    experiment.add_argument("--out", default=None)
    experiment.add_argument("--format", choices=("csv", "json"), default="csv")
    experiment.add_argument("--storage", choices=("auto", "summary", "stored"), default="auto")
    experiment.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
