"""Benchmark protocol: model x size grid, repeated runs, box statistics, CSV output."""

from __future__ import annotations

import csv
import io
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Iterable, Sequence, TextIO

from .instance import MASK64, Model, Rng64, generate
from .search import Algorithm, multi_start

PAPER_FACILITY_COUNTS = (50, 60, 70, 80, 90, 100, 110, 120, 130, 140)


class ConfigError(ValueError):
    pass


class MissingAlgorithmError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    model: Model
    m: int = 1000
    facility_counts: tuple[int, ...] = PAPER_FACILITY_COUNTS
    instances_per_cell: int = 10
    runs_per_algorithm: int = 1000
    master_seed: int = 0
    algorithms: tuple[Algorithm, ...] = (Algorithm.LS, Algorithm.RLS)

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        object.__setattr__(self, "facility_counts", tuple(int(n) for n in self.facility_counts))
        object.__setattr__(self, "algorithms", tuple(Algorithm.parse(a) for a in self.algorithms))
        if self.m < 1 or self.instances_per_cell < 1 or self.runs_per_algorithm < 1:
            raise ConfigError("customers, instances and runs must all be >= 1")
        if not self.facility_counts or min(self.facility_counts) < 1:
            raise ConfigError("facility counts must be a non-empty list of values >= 1")
        if not self.algorithms:
            raise ConfigError("at least one algorithm is required")


def paper_configs(master_seed: int = 0) -> list[ExperimentConfig]:
    return [ExperimentConfig(model=k, master_seed=master_seed) for k in Model]


def small_configs(master_seed: int = 0) -> list[ExperimentConfig]:
    return [ExperimentConfig(model=k, m=100, facility_counts=(10, 15, 20), instances_per_cell=5,
                             runs_per_algorithm=100, master_seed=master_seed) for k in Model]


def _int_list(key: str, value: str) -> list[int]:
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"{key}: expected comma-separated integers, got {value!r}") from None


def parse_config(text: str) -> list[ExperimentConfig]:
    """Read key=value lines; ``model`` may list several models, giving one config each."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        values[key.strip()] = value.strip()

    known = {"model", "customers", "facilities", "instances", "runs", "seed", "algorithms"}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "model" not in values:
        raise ConfigError("config needs a 'model' entry")

    kwargs = {}
    if "customers" in values:
        kwargs["m"] = _int_list("customers", values["customers"])[0]
    if "facilities" in values:
        kwargs["facility_counts"] = tuple(_int_list("facilities", values["facilities"]))
    if "instances" in values:
        kwargs["instances_per_cell"] = _int_list("instances", values["instances"])[0]
    if "runs" in values:
        kwargs["runs_per_algorithm"] = _int_list("runs", values["runs"])[0]
    if "seed" in values:
        kwargs["master_seed"] = _int_list("seed", values["seed"])[0]
    if "algorithms" in values:
        try:
            kwargs["algorithms"] = tuple(Algorithm.parse(a.strip())
                                         for a in values["algorithms"].split(",") if a.strip())
        except ValueError as exc:
            raise ConfigError(f"algorithms: {exc}") from None
    try:
        return [ExperimentConfig(model=Model(k), **kwargs)
                for k in _int_list("model", values["model"])]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def derive_seed(master_seed: int, *parts: int) -> int:
    """Chain splitmix64 outputs through each part, so one integer fixes every seed."""
    s = Rng64(master_seed).next()
    for p in parts:
        s = Rng64(s ^ (int(p) & MASK64)).next()
    return s


_ALG_CODE = {Algorithm.LS: 0, Algorithm.RLS: 1}


@dataclass
class RunRow:
    model: int | None
    n: int
    m: int
    instance_seed: int | None
    instance_index: int
    algorithm: str
    run_index: int
    run_seed: int | None
    objective: int
    iterations_used: int
    accepted_moves: int
    wall_time_ms: float

    def key(self):
        return (self.model or 0, self.n, self.instance_index, self.algorithm, self.run_index)


def rows_from_records(records, *, model, n, m, instance_seed, instance_index) -> list[RunRow]:
    return [
        RunRow(model=model, n=n, m=m, instance_seed=instance_seed, instance_index=instance_index,
               algorithm=rec.algorithm.value, run_index=r, run_seed=rec.seed,
               objective=rec.final_objective, iterations_used=rec.iterations_used,
               accepted_moves=rec.accepted_moves, wall_time_ms=rec.wall_time)
        for r, rec in enumerate(records)
    ]


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> list[RunRow]:
    """Generate every instance of the grid and run each algorithm on it.

    Output is sorted by (model, n, instance_index, algorithm, run_index) and
    depends on cfg alone, apart from the timing column.
    """
    model = int(cfg.model)
    cells = []
    for n in cfg.facility_counts:
        for idx in range(cfg.instances_per_cell):
            inst_seed = derive_seed(cfg.master_seed, model, n, idx)
            for alg in cfg.algorithms:
                cells.append((n, idx, inst_seed, alg))

    cache = {}

    def instance_for(n, inst_seed):
        key = (n, inst_seed)
        if key not in cache:
            cache[key] = generate(cfg.model, n, cfg.m, inst_seed)
        return cache[key]

    def run_cell(cell):
        n, idx, inst_seed, alg = cell
        inst = instance_for(n, inst_seed)
        base = derive_seed(cfg.master_seed, model, n, idx, _ALG_CODE[alg])
        records = multi_start(inst, alg, cfg.runs_per_algorithm, base, warn=False)
        return rows_from_records(records, model=model, n=n, m=cfg.m, instance_seed=inst_seed,
                                 instance_index=idx)

    # generate up front so worker threads only read instances
    for n, _, inst_seed, _ in cells:
        instance_for(n, inst_seed)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(run_cell, cells))
    else:
        chunks = [run_cell(cell) for cell in cells]
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=RunRow.key)
    return rows


# -- statistics ---------------------------------------------------------------

def _num(x):
    """Integral values as int, others as float."""
    x = float(x)
    return int(x) if x.is_integer() else x


def _median(sorted_values: Sequence[int]):
    k = len(sorted_values)
    mid = k // 2
    if k % 2:
        return sorted_values[mid]
    return (sorted_values[mid - 1] + sorted_values[mid]) / 2


@dataclass
class BoxStats:
    count: int
    min: int
    q1: float
    median: float
    q3: float
    max: int
    lo_whisker: int
    hi_whisker: int
    outliers: list[int] = field(default_factory=list)
    mean: float = 0.0
    stddev: float = 0.0

    @property
    def iqr(self):
        return _num(self.q3 - self.q1)


def summarize(objectives: Iterable[int]) -> BoxStats:
    """Five-number summary with Tukey hinges and 1.5 IQR whiskers.

    The hinges are medians of the lower and upper halves; for an odd count
    both halves include the median.
    """
    xs = sorted(objectives)
    if not xs:
        raise ValueError("cannot summarize an empty list")
    k = len(xs)
    half = (k + 1) // 2
    q1 = _median(xs[:half])
    q3 = _median(xs[k - half:])
    iqr = q3 - q1
    lo_fence = q1 - 1.5 * iqr
    hi_fence = q3 + 1.5 * iqr
    inside = [x for x in xs if lo_fence <= x <= hi_fence]
    return BoxStats(
        count=k,
        min=xs[0],
        q1=_num(q1),
        median=_num(_median(xs)),
        q3=_num(q3),
        max=xs[-1],
        lo_whisker=inside[0],
        hi_whisker=inside[-1],
        outliers=[x for x in xs if x < lo_fence or x > hi_fence],
        mean=float(statistics.fmean(xs)),
        stddev=float(statistics.pstdev(xs)),
    )


def _group(rows: Iterable[RunRow]):
    groups: dict[tuple, list[RunRow]] = {}
    for row in rows:
        groups.setdefault((row.model, row.n, row.m, row.instance_index, row.algorithm), []).append(row)
    return groups


@dataclass
class SummaryRow:
    model: int | None
    n: int
    m: int
    instance_index: int
    algorithm: str
    stats: BoxStats


def summarize_table(rows: Iterable[RunRow]) -> list[SummaryRow]:
    out = [SummaryRow(model, n, m, idx, alg, summarize(r.objective for r in group))
           for (model, n, m, idx, alg), group in _group(rows).items()]
    out.sort(key=lambda s: (s.model or 0, s.n, s.instance_index, s.algorithm))
    return out


@dataclass
class Comparison:
    model: int | None
    n: int
    m: int
    instance_index: int
    median_ls: float
    median_rls: float
    best_ls: int
    best_rls: int
    winner_by_median: str
    winner_by_best: str


def _winner(ls, rls) -> str:
    if ls < rls:
        return "LS"
    if rls < ls:
        return "RLS"
    return "tie"


def compare_algorithms(rows: Iterable[RunRow]) -> list[Comparison]:
    """Per instance: medians and bests of LS and RLS, and who wins on each (lower is better)."""
    by_instance: dict[tuple, dict[str, list[int]]] = {}
    for row in rows:
        key = (row.model, row.n, row.m, row.instance_index)
        by_instance.setdefault(key, {}).setdefault(row.algorithm, []).append(row.objective)
    out = []
    for (model, n, m, idx), algs in by_instance.items():
        missing = [a.value for a in Algorithm if a.value not in algs]
        if missing:
            raise MissingAlgorithmError(
                f"instance (model={model}, n={n}, index={idx}) has no {'/'.join(missing)} runs")
        ls = sorted(algs["LS"])
        rls = sorted(algs["RLS"])
        med_ls, med_rls = _num(_median(ls)), _num(_median(rls))
        out.append(Comparison(model, n, m, idx, med_ls, med_rls, ls[0], rls[0],
                              _winner(med_ls, med_rls), _winner(ls[0], rls[0])))
    out.sort(key=lambda c: (c.model or 0, c.n, c.instance_index))
    return out


@dataclass
class PairedRun:
    model: int | None
    n: int
    m: int
    instance_index: int
    run_index: int
    ls_objective: int | None
    rls_objective: int | None
    reference: int | None


def pair_runs(rows: Iterable[RunRow], references: dict | None = None) -> list[PairedRun]:
    """Line up run r of LS with run r of RLS on each instance.

    ``references`` maps (model, n, instance_index) to an externally verified
    objective, repeated on every pair of that instance.
    """
    references = references or {}
    table: dict[tuple, dict[int, dict[str, int]]] = {}
    for row in rows:
        key = (row.model, row.n, row.m, row.instance_index)
        table.setdefault(key, {}).setdefault(row.run_index, {})[row.algorithm] = row.objective
    out = []
    for (model, n, m, idx), runs in sorted(table.items(), key=lambda kv: (kv[0][0] or 0,) + kv[0][1:]):
        ref = references.get((model, n, idx))
        for r in sorted(runs):
            out.append(PairedRun(model, n, m, idx, r, runs[r].get("LS"), runs[r].get("RLS"), ref))
    return out


# -- CSV ----------------------------------------------------------------------

RUN_COLUMNS = [f.name for f in fields(RunRow)]
SUMMARY_COLUMNS = ["model", "n", "m", "instance_index", "algorithm", "count", "min", "q1",
                   "median", "q3", "max", "lo_whisker", "hi_whisker", "mean", "stddev",
                   "n_outliers"]
COMPARISON_COLUMNS = [f.name for f in fields(Comparison)]
PAIR_COLUMNS = [f.name for f in fields(PairedRun)]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write(header, records, sink: TextIO | None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows([_cell(v) for v in rec] for rec in records)
    text = buf.getvalue()
    if sink is not None:
        sink.write(text)
    return text


def emit_runs_csv(rows: Iterable[RunRow], sink: TextIO | None = None) -> str:
    return _write(RUN_COLUMNS, ([getattr(r, c) for c in RUN_COLUMNS] for r in rows), sink)


def emit_summary_csv(summary: Iterable[SummaryRow], sink: TextIO | None = None) -> str:
    def record(s):
        b = s.stats
        return [s.model, s.n, s.m, s.instance_index, s.algorithm, b.count, b.min, b.q1,
                b.median, b.q3, b.max, b.lo_whisker, b.hi_whisker, b.mean, b.stddev,
                len(b.outliers)]
    return _write(SUMMARY_COLUMNS, map(record, summary), sink)


def emit_comparison_csv(comparisons: Iterable[Comparison], sink: TextIO | None = None) -> str:
    return _write(COMPARISON_COLUMNS,
                  ([getattr(c, k) for k in COMPARISON_COLUMNS] for c in comparisons), sink)


def emit_pairs_csv(pairs: Iterable[PairedRun], sink: TextIO | None = None) -> str:
    return _write(PAIR_COLUMNS, ([getattr(p, k) for k in PAIR_COLUMNS] for p in pairs), sink)


def emit_csv(table, sink: TextIO | None = None) -> str:
    """Dispatch on the row type of a run table, summary or comparison."""
    table = list(table)
    kind = type(table[0]) if table else RunRow
    writer = {RunRow: emit_runs_csv, SummaryRow: emit_summary_csv,
              Comparison: emit_comparison_csv, PairedRun: emit_pairs_csv}[kind]
    return writer(table, sink)


def _opt_int(text: str) -> int | None:
    return int(text) if text != "" else None


def read_runs_csv(source: str | TextIO) -> list[RunRow]:
    text = source if isinstance(source, str) else source.read()
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != RUN_COLUMNS:
        raise ValueError(f"runs CSV header mismatch: {reader.fieldnames}")
    rows = []
    for rec in reader:
        rows.append(RunRow(
            model=_opt_int(rec["model"]), n=int(rec["n"]), m=int(rec["m"]),
            instance_seed=_opt_int(rec["instance_seed"]), instance_index=int(rec["instance_index"]),
            algorithm=rec["algorithm"], run_index=int(rec["run_index"]),
            run_seed=_opt_int(rec["run_seed"]), objective=int(rec["objective"]),
            iterations_used=int(rec["iterations_used"]),
            accepted_moves=int(rec["accepted_moves"]), wall_time_ms=float(rec["wall_time_ms"]),
        ))
    return rows

