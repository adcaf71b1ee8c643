"""``fastconc`` command line: compute, simulate and bench.

Exit codes: 0 success, 1 usage or input error, 2 estimation error (the error
class name is printed on standard error).
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .bench import (
    METHODS,
    PopulationCache,
    bench_scaling,
    continuous_population,
    discrete_population,
    method_grid,
    nu_from_percent,
    record,
    simulate_continuous,
    simulate_discrete,
    summarize,
    write_records_csv,
    write_summary_csv,
)
from .core import ContinuousDataset, CsvFormat, EstimationError, InputError, ingest_csv, split_binary

EXIT_OK, EXIT_USAGE, EXIT_ESTIMATION = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _str_list(text: str) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def _column(text: str) -> int | str:
    return int(text) if text.lstrip("-").isdigit() else text


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fastconc", description="Exact and approximate concordance probability.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compute", help="estimate C from a CSV of (response, prediction) rows")
    c.add_argument("--mode", choices=("discrete", "continuous"), required=True)
    c.add_argument("--input", required=True, type=Path)
    c.add_argument("--method", choices=METHODS, required=True)
    c.add_argument("--k", type=_positive)
    c.add_argument("--q", type=_positive)
    c.add_argument("--nu", type=float)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--ties", choices=("exclude", "half"), default="exclude")
    c.add_argument("--output", choices=("json", "csv"), default="json")
    c.add_argument("--response-col", type=_column, default=0, help="index or header name")
    c.add_argument("--prediction-col", type=_column, default=1, help="index or header name")
    c.add_argument("--delimiter", default=",")

    s = sub.add_parser("simulate", help="Monte-Carlo bias and run-time table for one scenario")
    s.add_argument("--mode", choices=("discrete", "continuous"), required=True)
    s.add_argument("--mu", type=float, default=0.10)
    s.add_argument("--kappa", type=float, default=50.0)
    s.add_argument("--rho", type=float, default=0.25)
    s.add_argument("--nu-percent", type=float, default=0.0)
    s.add_argument("--n", type=_positive, default=50_000)
    s.add_argument("--reps", type=_positive, default=100)
    s.add_argument("--methods", type=_str_list, default=["kmeans", "marginal"])
    s.add_argument("--k-list", type=_int_list, default=[100])
    s.add_argument("--q-list", type=_int_list, default=[100])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--ties", choices=("exclude", "half"), default="exclude")
    s.add_argument("--population", type=float, help="reference C; skips the Monte-Carlo oracle")
    s.add_argument("--pop-n", type=_positive, help="oracle sample size (default 1e6 discrete, 5e4 continuous)")
    s.add_argument("--pop-reps", type=_positive, help="oracle repetitions (default 5 discrete, 10 continuous)")
    s.add_argument("--cache", type=Path, default=Path(".fastconc_cache.json"),
                   help="JSON file caching population and nu values")
    s.add_argument("--output", type=Path, help="summary CSV path (default: standard output)")
    s.add_argument("--records", type=Path, help="per-repetition CSV (default: next to --output)")
    s.add_argument("--workers", type=_positive, default=1)

    b = sub.add_parser("bench", help="median run times across data sizes")
    b.add_argument("--mode", choices=("discrete", "continuous"), required=True)
    b.add_argument("--sizes", type=_int_list, required=True)
    b.add_argument("--methods", type=_str_list, required=True)
    b.add_argument("--k-list", type=_int_list, default=[100])
    b.add_argument("--q-list", type=_int_list, default=[100])
    b.add_argument("--reps", type=_positive, default=3)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--nu", type=float, default=0.0)
    return parser


def _cmd_compute(args) -> int:
    if args.method == "kmeans" and args.k is None:
        raise UsageError("--method kmeans requires --k")
    if args.method == "marginal" and args.q is None:
        raise UsageError("--method marginal requires --q")
    if args.mode == "discrete" and args.nu is not None:
        raise UsageError("--nu applies to --mode continuous only")
    if args.mode == "continuous" and args.method == "trapezium":
        raise UsageError("the trapezium method needs --mode discrete")
    if args.nu is not None and args.nu < 0:
        raise UsageError("--nu must be >= 0")
    if not args.input.is_file():
        raise UsageError(f"--input {args.input}: no such file")
    pairs = ingest_csv(args.input, CsvFormat(args.response_col, args.prediction_col, None, args.delimiter))
    if args.mode == "discrete":
        data = split_binary(pairs)
    else:
        data = ContinuousDataset(pairs.response, pairs.prediction, args.nu or 0.0)
    params = {"seed": args.seed, "ties": args.ties}
    if args.method == "kmeans":
        params["k"] = args.k
    if args.method == "marginal":
        params["q"] = args.q
    rec = record(args.method, data, len(pairs), **params)
    out = rec.to_json()
    if args.output == "json":
        print(json.dumps(out))
    else:
        cols = ["method", "k", "q", "nu", "seed", "ties", "c_hat", "concordant_mass", "discordant_mass",
                "elapsed_ms", "n"]
        flat = {**out, **out["params"]}
        w = csv.DictWriter(sys.stdout, fieldnames=cols, extrasaction="ignore")
        w.writeheader()
        w.writerow({key: flat.get(key, "") for key in cols})
    return EXIT_OK


def _cmd_simulate(args) -> int:
    runs = method_grid(args.methods, args.k_list, args.q_list)
    cache = PopulationCache(args.cache)
    if args.mode == "discrete":
        population = args.population
        if population is None:
            population = discrete_population(args.mu, args.kappa, args.pop_n or 1_000_000, args.pop_reps or 5,
                                             args.seed, cache)
        records = simulate_discrete(args.mu, args.kappa, args.n, args.reps, runs, args.seed, population,
                                    args.ties, args.workers)
    else:
        if not 0 <= args.nu_percent < 100:
            raise UsageError("--nu-percent must lie in [0, 100)")
        nu = nu_from_percent(args.nu_percent, seed=args.seed, cache=cache)
        population = args.population
        if population is None:
            population = continuous_population(args.rho, nu, args.pop_n or 50_000, args.pop_reps or 10,
                                               args.seed, cache)
        records = simulate_continuous(args.rho, nu, args.n, args.reps, runs, args.seed, population,
                                      args.ties, args.workers)
    rows = summarize(records)
    records_path = args.records
    if records_path is None and args.output is not None:
        records_path = args.output.with_name(args.output.stem + ".records.csv")
    if records_path is not None:
        write_records_csv(records, records_path)
    if args.output is None:
        write_summary_csv(rows, sys.stdout)
    else:
        write_summary_csv(rows, args.output)
    print(f"population C = {population!r}", file=sys.stderr)
    return EXIT_OK


def _cmd_bench(args) -> int:
    runs = method_grid(args.methods, args.k_list, args.q_list)
    if args.mode == "continuous" and any(m == "trapezium" for m, _ in runs):
        raise UsageError("the trapezium method needs --mode discrete")
    report = bench_scaling(args.mode, args.sizes, runs, args.reps, args.seed, nu=args.nu)
    print(json.dumps(report.to_json(), indent=1))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"compute": _cmd_compute, "simulate": _cmd_simulate, "bench": _cmd_bench}[args.command]
    try:
        return handler(args)
    except EstimationError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION
    except (UsageError, InputError, ValueError) as exc:
        print(f"fastconc {args.command}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
