"""Command line entry point: ``knapga generate|solve|bench|verify``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict

from .bench import CampaignSpec, render_report, run_campaign
from .core import ContractError, evaluate, greedy_half, greedy_ratio
from .exact import DPCapacityError, brute_force, dp_optimum
from .ga import GaConfig, bits_to_hex, hex_to_bits, run
from .gen import (
    Correlation,
    InstanceFormatError,
    SpannerParams,
    format_instance,
    generate,
    read_instance,
    write_instance,
)


def _cmd_generate(args) -> int:
    params = SpannerParams(
        n=args.n,
        R=args.r,
        v=args.v,
        m=args.m,
        correlation=Correlation(args.correlation),
        capacity_ratio=args.ratio,
        seed=args.seed,
    )
    instance = generate(params)
    if args.out == "-":
        sys.stdout.write(format_instance(instance))
    else:
        write_instance(instance, args.out)
    return 0


def _emit(payload: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(payload, sort_keys=True))
    else:
        for k, v in payload.items():
            print(f"{k} {v}")


def _cmd_solve(args) -> int:
    instance = read_instance(args.inp)
    if args.algo in ("dp", "brute"):
        res = dp_optimum(instance) if args.algo == "dp" else brute_force(instance)
        _emit({"optimum": res.optimum, "witness": bits_to_hex(res.witness)}, args.json)
        return 0
    if args.algo in ("greedy", "greedy-half"):
        bits, ev = greedy_ratio(instance) if args.algo == "greedy" else greedy_half(instance)
        _emit({"value": ev.value, "weight": ev.weight, "witness": bits_to_hex(bits)}, args.json)
        return 0

    optimum = args.optimum
    if optimum is None and args.oracle == "dp":
        optimum = dp_optimum(instance, witness=False).optimum
    config = GaConfig(
        population_size=args.pop,
        max_generations=args.gens,
        time_limit=args.time_limit if args.time_limit > 0 else None,
        init_include_prob=args.init_prob,
        penalty_c=args.c,
        stagnation_window=args.stagnation_window,
        seed=args.seed,
        record_trace=args.trace is not None,
    )
    report = run(instance, config, oracle_optimum=optimum)
    if args.trace is not None:
        with open(args.trace, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["generation", "best_value", "best_fitness", "mutation_rate", "selection_mode"])
            for row in report.trace:
                writer.writerow(
                    [row.generation, row.best_value, repr(row.best_fitness), repr(row.mutation_rate), row.selection_mode]
                )
    payload = report.to_dict()
    payload["optimum"] = optimum
    if not args.json:
        payload = {k: payload[k] for k in ("best_value", "solved", "generations_used", "wall_time", "best_bits")}
    _emit(payload, args.json)
    return 0


def _cmd_bench(args) -> int:
    spec = CampaignSpec.load(args.spec)
    report = run_campaign(spec, workers=args.workers)
    text = render_report(report, args.format)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


def _cmd_verify(args) -> int:
    instance = read_instance(args.inp)
    bits = hex_to_bits(args.bits, instance.n)
    ev = evaluate(instance, bits)
    _emit(asdict(ev), args.json)
    return 0 if ev.feasible else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="knapga", description="Spanner knapsack generator and solvers.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a spanner instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--r", type=int, required=True, help="coefficient range R")
    g.add_argument("--v", type=int, default=2, help="spanner set size")
    g.add_argument("--m", type=int, default=10, help="multiplier range")
    g.add_argument("--correlation", choices=[c.value for c in Correlation], default="strongly")
    g.add_argument("--ratio", type=float, default=0.5, help="capacity as a fraction of total weight")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, help="output file, '-' for stdout")
    g.set_defaults(func=_cmd_generate)

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("--algo", choices=["dp", "brute", "ga", "greedy", "greedy-half"], required=True)
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--pop", type=int, default=200)
    s.add_argument("--gens", type=int, default=1000)
    s.add_argument("--time-limit", type=float, default=300.0, help="seconds; 0 disables")
    s.add_argument("--c", type=float, default=100.0, help="penalty constant")
    s.add_argument("--init-prob", type=float, default=0.7)
    s.add_argument("--stagnation-window", type=int, default=20)
    target = s.add_mutually_exclusive_group()
    target.add_argument("--optimum", type=int, default=None, help="known optimum; stops the GA when reached")
    target.add_argument("--oracle", choices=["dp"], default=None)
    s.add_argument("--trace", default=None, help="per-generation CSV output")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=_cmd_solve)

    b = sub.add_parser("bench", help="run a campaign")
    b.add_argument("--spec", required=True)
    b.add_argument("--out", default="-")
    b.add_argument("--format", choices=["table", "json", "csv"], default="table")
    b.add_argument("--workers", type=int, default=1)
    b.set_defaults(func=_cmd_bench)

    v = sub.add_parser("verify", help="re-evaluate a hex-encoded selection")
    v.add_argument("--in", dest="inp", required=True)
    v.add_argument("--bits", required=True)
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ContractError, InstanceFormatError, DPCapacityError, OSError, json.JSONDecodeError) as exc:
        print(f"knapga: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
