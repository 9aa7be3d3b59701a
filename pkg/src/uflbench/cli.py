"""Command-line entry point.

Exit status: 0 on success, 1 on usage errors, 2 on data or feasibility errors.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
import warnings
from pathlib import Path

from . import exact, experiment
from .instance import InstanceError, Model, generate, parse_instance, write_instance
from .search import Algorithm, multi_start

log = logging.getLogger("uflbench")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def atomic_write(path: str | Path, text: str) -> None:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _output(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        atomic_write(path, text)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path!r}: {exc.strerror}") from None


def _load_instance(path: str):
    try:
        return parse_instance(_read(path))
    except InstanceError as exc:
        raise DataError(f"{path}: {exc}") from None


def cmd_gen(args) -> None:
    inst = generate(Model(args.model), args.facilities, args.customers, args.seed)
    header = [f"model={args.model} n={args.facilities} m={args.customers} seed={args.seed}"]
    _output(args.out, write_instance(inst, comments=header))


def cmd_solve(args) -> None:
    inst = _load_instance(args.instance)
    records = multi_start(inst, Algorithm.parse(args.alg), args.runs, args.seed)
    rows = experiment.rows_from_records(records, model=None, n=inst.n, m=inst.m,
                                        instance_seed=None, instance_index=0)
    _output(args.out, experiment.emit_runs_csv(rows))


def cmd_oracle(args) -> None:
    inst = _load_instance(args.instance)
    try:
        res = exact.brute_force_opt(inst)
    except exact.InstanceTooLargeError as exc:
        raise DataError(str(exc)) from None
    print(f"objective {res.optimal_objective}")
    print(f"open {exact.format_open_set(res.optimal_open_set)}")


def cmd_export_lp(args) -> None:
    _output(args.out, exact.export_lp(_load_instance(args.instance)))


def cmd_import_sol(args) -> None:
    inst = _load_instance(args.instance)
    try:
        _, obj = exact.import_open_set(inst, _read(args.solution))
    except ValueError as exc:
        raise DataError(f"{args.solution}: {exc}") from None
    print(f"objective {obj}")


def cmd_bench(args) -> None:
    if args.config and args.small:
        raise UsageError("bench: --config and --small are mutually exclusive")
    if args.config:
        try:
            configs = experiment.parse_config(_read(args.config))
        except experiment.ConfigError as exc:
            raise DataError(f"{args.config}: {exc}") from None
    elif args.small:
        configs = experiment.small_configs()
    else:
        configs = experiment.paper_configs()

    rows = []
    for cfg in configs:
        log.info("model %d: n in %s, %d instances, %d runs", cfg.model, list(cfg.facility_counts),
                 cfg.instances_per_cell, cfg.runs_per_algorithm)
        rows.extend(experiment.run_experiment(cfg, jobs=args.jobs))
    out = Path(args.out_dir)
    atomic_write(out / "runs.csv", experiment.emit_runs_csv(rows))
    atomic_write(out / "summary.csv", experiment.emit_summary_csv(experiment.summarize_table(rows)))
    algs = {r.algorithm for r in rows}
    comparisons = experiment.compare_algorithms(rows) if algs == {"LS", "RLS"} else []
    atomic_write(out / "comparison.csv", experiment.emit_comparison_csv(comparisons))


def cmd_stats(args) -> None:
    try:
        rows = experiment.read_runs_csv(_read(args.runs))
    except (ValueError, KeyError) as exc:
        raise DataError(f"{args.runs}: {exc}") from None
    _output(args.out, experiment.emit_summary_csv(experiment.summarize_table(rows)))


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="uflbench", description="Uncapacitated facility location benchmark toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--model", type=int, choices=[1, 2, 3, 4], required=True)
    p.add_argument("--facilities", type=_positive, required=True)
    p.add_argument("--customers", type=_positive, required=True)
    p.add_argument("--seed", type=_non_negative, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="run LS or RLS on an instance file")
    p.add_argument("--alg", choices=["ls", "rls", "LS", "RLS"], required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--runs", type=_positive, default=1)
    p.add_argument("--seed", type=_non_negative, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="exact optimum by exhaustive search (n <= 25)")
    p.add_argument("--instance", required=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("export-lp", help="write the ILP in CPLEX LP format")
    p.add_argument("--instance", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_lp)

    p = sub.add_parser("import-sol", help="evaluate an external open-set solution")
    p.add_argument("--instance", required=True)
    p.add_argument("--solution", required=True)
    p.set_defaults(func=cmd_import_sol)

    p = sub.add_parser("bench", help="run the full benchmark protocol")
    p.add_argument("--config")
    p.add_argument("--small", action="store_true", help="desk-size preset")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--jobs", type=_positive, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("stats", help="box statistics from a runs.csv")
    p.add_argument("--runs", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(parser.format_usage().rstrip(), file=sys.stderr)
        print(exc, file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
