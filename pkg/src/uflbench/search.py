"""Steepest-descent local search (LS) and randomised local search (RLS)."""

from __future__ import annotations

import enum
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .instance import MASK64, Instance, Rng64


class Algorithm(str, enum.Enum):
    LS = "LS"
    RLS = "RLS"

    @classmethod
    def parse(cls, value: "Algorithm | str") -> "Algorithm":
        return value if isinstance(value, cls) else cls(str(value).upper())


@dataclass
class RunRecord:
    algorithm: Algorithm
    seed: int | None
    initial_objective: int
    final_objective: int
    iterations_used: int
    accepted_moves: int
    trace: list[tuple[int, int]] = field(default_factory=list)
    moves: list[int] = field(default_factory=list)
    wall_time: float = 0.0  # milliseconds

    def same_outcome(self, other: "RunRecord") -> bool:
        """Equality ignoring wall-clock time."""
        return (self.algorithm, self.seed, self.initial_objective, self.final_objective,
                self.iterations_used, self.accepted_moves, self.trace, self.moves) == (
                other.algorithm, other.seed, other.initial_objective, other.final_objective,
                other.iterations_used, other.accepted_moves, other.trace, other.moves)


def ls_run(inst: Instance) -> RunRecord:
    """Best-improvement descent over single flips, capped at n iterations.

    Stops at the first iteration whose best feasible flip does not strictly
    improve. Ties between equal best deltas go to the lowest index.
    """
    n = inst.n
    moves = np.empty(n, np.int64)
    objs = np.empty(n, np.int64)
    t0 = time.perf_counter()
    initial, iterations, accepted = K.ls_run(inst.f, inst.c, moves, objs)
    elapsed = (time.perf_counter() - t0) * 1e3
    trace = [(k + 1, int(objs[k])) for k in range(accepted)]
    return RunRecord(
        algorithm=Algorithm.LS,
        seed=None,
        initial_objective=int(initial),
        final_objective=trace[-1][1] if trace else int(initial),
        iterations_used=int(iterations),
        accepted_moves=int(accepted),
        trace=trace,
        moves=moves[:accepted].tolist(),
        wall_time=elapsed,
    )


def rls_run(inst: Instance, seed: int) -> RunRecord:
    """n^2 uniformly random flip proposals; a proposal is kept unless it worsens the objective.

    Proposing to close the last open facility is rejected but still uses up
    an iteration.
    """
    budget = inst.n * inst.n
    moves = np.empty(budget, np.int64)
    objs = np.empty(budget, np.int64)
    iters = np.empty(budget, np.int64)
    t0 = time.perf_counter()
    initial, iterations, accepted = K.rls_run(
        inst.f, inst.c, np.uint64(int(seed) & MASK64), moves, objs, iters)
    elapsed = (time.perf_counter() - t0) * 1e3
    trace = list(zip(iters[:accepted].tolist(), objs[:accepted].tolist()))
    return RunRecord(
        algorithm=Algorithm.RLS,
        seed=int(seed) & MASK64,
        initial_objective=int(initial),
        final_objective=trace[-1][1] if trace else int(initial),
        iterations_used=int(iterations),
        accepted_moves=int(accepted),
        trace=trace,
        moves=moves[:accepted].tolist(),
        wall_time=elapsed,
    )


def run_seeds(base_seed: int, runs: int) -> list[int]:
    """Per-run seeds: successive outputs of a generator seeded with base_seed.

    splitmix64 outputs within one stream are pairwise distinct.
    """
    rng = Rng64(base_seed)
    return [rng.next() for _ in range(runs)]


def multi_start(inst: Instance, alg: Algorithm | str, runs: int, base_seed: int = 0,
                warn: bool = True) -> list[RunRecord]:
    alg = Algorithm.parse(alg)
    if runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    seeds = run_seeds(base_seed, runs)
    if alg is Algorithm.RLS:
        return [rls_run(inst, s) for s in seeds]
    if runs > 1 and warn:
        warnings.warn("LS is deterministic; all runs on one instance are identical", stacklevel=2)
    # one descent, replicated: every LS run on an instance is identical
    first = ls_run(inst)
    records = []
    for s in seeds:
        rec = RunRecord(**{**first.__dict__, "trace": list(first.trace), "moves": list(first.moves)})
        rec.seed = s
        records.append(rec)
    return records
