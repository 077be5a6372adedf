"""Command-line entry point.

    prefap run      --algo prefap --theta gt --dist-r uniform:20:50 --dist-s uniform:10:40
    prefap ablation --theta gt --dist-r zipf:1.2 --dist-s zipf:1.3 --repeat 30
    prefap bench    --repeat 30 --significance --dist-r zipf:1.2 --dist-s zipf:1.3
    prefap verify   --algo cfs --theta le --n 500

Exit codes: 0 success, 1 verification mismatch, 2 bad flags, 3 I/O or
parse errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from . import bench
from .datasource import EmptyFile, InvalidSpec, ParseError, load_csv, windows
from .joiner import run
from .model import Algorithm, Config, JoinError, ThetaOp
from .oracle import oracle_join, oracle_multiway

NAMES = ("R", "S", "T", "U", "V", "W")
DEFAULT_DISTS = ("uniform:20:50", "uniform:10:40", "uniform:0:30")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p: argparse.ArgumentParser, algo=True):
    if algo:
        p.add_argument("--algo", default="prefap", choices=[a.value for a in Algorithm])
    p.add_argument("--theta", default="gt", help="operator or comma list for multi-way (gt, ge, lt, le)")
    p.add_argument("--partitions", type=int, default=10)
    p.add_argument("--window", type=int, default=1000)
    p.add_argument("--workers", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeat", type=int, default=1)
    p.add_argument("--repeat-mode", choices=("seeds", "windows"), default="seeds")
    p.add_argument("--input", action="append", default=[], metavar="CSV")
    p.add_argument("--column", default="value")
    p.add_argument("--dist-r")
    p.add_argument("--dist-s")
    p.add_argument("--dist-t")
    p.add_argument("--n", type=int, default=None, help="elements per generated stream (default: one window)")
    p.add_argument("--ablate", default="", help="comma list from {prefilter, amalgamation}")
    p.add_argument("--no-repartition", action="store_true")
    p.add_argument("--ceil-subspan", action="store_true")
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--dump-results")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="prefap", description="Windowed theta-join benchmarks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _common(sub.add_parser("run", help="run one algorithm over aligned windows"))
    _common(sub.add_parser("ablation", help="Prefap with each stage switched off"), algo=False)
    b = sub.add_parser("bench", help="several algorithms on identical inputs")
    _common(b, algo=False)
    b.add_argument("--algo", default="rbm,obt,cfs,ftj,prefap", help="comma list of algorithms")
    b.add_argument("--significance", action="store_true", help="t-test Prefap against FTJ")
    _common(sub.add_parser("verify", help="check results against the brute-force oracle"))
    return parser


def _config(args, algo: str) -> Config:
    try:
        thetas = tuple(ThetaOp.parse(t) for t in args.theta.split(","))
    except ValueError as exc:
        raise UsageError(f"--theta: {exc}") from None
    ablate = {a.strip() for a in args.ablate.split(",") if a.strip()}
    unknown = ablate - {"prefilter", "amalgamation"}
    if unknown:
        raise UsageError(f"--ablate: unknown stage(s) {sorted(unknown)}")
    # re-partitioning options only exist for the partition-filtering algorithms
    filtering = algo in ("prefap", "ftj")
    workers = args.workers
    env = os.environ.get("PREFAP_WORKERS")
    if env:
        try:
            workers = int(env)
        except ValueError:
            raise UsageError(f"PREFAP_WORKERS must be an integer, got {env!r}") from None
    try:
        return Config(
            theta=thetas,
            partitions=args.partitions,
            window=args.window,
            workers=workers,
            seed=args.seed,
            algorithm=Algorithm.parse(algo),
            disable_prefilter="prefilter" in ablate,
            disable_amalgamation="amalgamation" in ablate,
            disable_repartition=args.no_repartition and filtering,
            ceil_subspan=args.ceil_subspan and filtering,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _source(args, arity: int):
    """Stream source and element count per stream (None for CSV inputs)."""
    if args.repeat < 1:
        raise UsageError("--repeat must be >= 1")
    if args.input:
        if len(args.input) != arity:
            raise UsageError(f"--input given {len(args.input)} times, need {arity} for --theta {args.theta}")
        streams = [load_csv(path, args.column, NAMES[k]) for k, path in enumerate(args.input)]
        return (lambda seed, count=None: streams), None, [s.name for s in streams]
    dists = [args.dist_r, args.dist_s, args.dist_t]
    if arity > 3:
        raise UsageError("synthetic inputs support at most 3 streams; use --input for more")
    chosen = [d or DEFAULT_DISTS[k] for k, d in enumerate(dists[:arity])]
    n = args.n if args.n is not None else args.window
    if n < 1:
        raise UsageError("--n must be >= 1")
    try:
        return bench.synthetic_source(chosen, n, NAMES), n, list(NAMES[:arity])
    except InvalidSpec as exc:
        raise UsageError(f"--dist: {exc}") from None


def _emit(args, report: bench.BenchReport):
    if args.format == "json":
        text, agg_text = report.to_jsonl(), None
    else:
        text, agg_text = report.runs_csv(), report.aggregate_csv()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        if agg_text is not None:
            root, _ = os.path.splitext(args.out)
            with open(root + ".aggregate.csv", "w", encoding="utf-8") as fh:
                fh.write(agg_text)
    else:
        sys.stdout.write(text)
        if agg_text is not None:
            sys.stdout.write("\n" + agg_text)


def cmd_run(args) -> int:
    cfg = _config(args, args.algo)
    source, n, names = _source(args, len(cfg.theta) + 1)
    report, dumps = bench.run_join(source, cfg, args.repeat, args.repeat_mode, n, keep_results=bool(args.dump_results))
    _emit(args, report)
    if args.dump_results:
        with open(args.dump_results, "w", encoding="utf-8") as fh:
            fh.write(bench.results_csv(dumps, names))
    return 0


def cmd_ablation(args) -> int:
    cfg = _config(args, "prefap")
    source, n, _ = _source(args, len(cfg.theta) + 1)
    _emit(args, bench.run_ablation(source, cfg, args.repeat, args.repeat_mode, n))
    return 0


def cmd_bench(args) -> int:
    algos = [a.strip() for a in args.algo.split(",") if a.strip()]
    for a in algos:
        if a not in {x.value for x in Algorithm}:
            raise UsageError(f"--algo: unknown algorithm {a!r}")
    if args.ablate and algos != ["prefap"]:
        raise UsageError("--ablate only applies to --algo prefap")
    if args.significance and not {"prefap", "ftj"} <= set(algos):
        raise UsageError("--significance needs prefap and ftj in --algo")
    report = bench.BenchReport()
    source = None
    for a in algos:
        cfg = _config(args, a)
        if source is None:
            source, n, _ = _source(args, len(cfg.theta) + 1)
        sub, _ = bench.run_join(source, cfg, args.repeat, args.repeat_mode, n)
        report.runs += sub.runs
    if args.significance:
        report.extra["significance"] = bench.significance(report, "prefap", "ftj")
    _emit(args, report)
    return 0


def cmd_verify(args) -> int:
    cfg = _config(args, args.algo)
    source, n, _ = _source(args, len(cfg.theta) + 1)
    bad = 0
    for k in range(args.repeat):
        c = replace(cfg, seed=cfg.seed + k)
        wins = [windows(s, c.window) for s in source(c.seed)]
        for i, ws in enumerate(zip(*wins)):
            res, _ = run(list(ws), c)
            if len(c.theta) == 1:
                expected, _ = oracle_join(c.theta[0], ws[0], ws[1])
            else:
                expected = oracle_multiway(ws, c.theta)
            want = np.array(sorted(expected), dtype=np.int64).reshape(-1, len(ws))
            ok = np.array_equal(res.sorted_ids(), want)
            bad += not ok
            print(f"seed={c.seed} window={i} results={len(res)} oracle={len(want)} {'ok' if ok else 'MISMATCH'}")
    return 1 if bad else 0


COMMANDS = {"run": cmd_run, "ablation": cmd_ablation, "bench": cmd_bench, "verify": cmd_verify}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"prefap: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ParseError, EmptyFile) as exc:
        print(f"prefap: error: {exc}", file=sys.stderr)
        return 3
    except JoinError as exc:
        print(f"prefap: error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
