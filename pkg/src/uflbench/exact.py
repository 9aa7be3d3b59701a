"""Exact baselines: exhaustive enumeration, LP export and external solution import."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from . import _kernels as K
from .evaluation import EmptyOpenSetError, evaluate_full
from .instance import Instance

MAX_BRUTE_FORCE_N = 25


class InstanceTooLargeError(ValueError):
    pass


class SolutionFormatError(ValueError):
    pass


@dataclass
class ExactResult:
    optimal_objective: int
    optimal_open_set: np.ndarray
    enumerated_count: int

    @property
    def open_indices(self) -> list[int]:
        return np.flatnonzero(self.optimal_open_set).tolist()


def _mask_to_bits(mask: int, n: int) -> np.ndarray:
    return np.array([(mask >> i) & 1 for i in range(n)], dtype=bool)


def _set_key(bits) -> tuple[int, ...]:
    return tuple(i for i, b in enumerate(bits) if b)


def brute_force_opt(inst: Instance) -> ExactResult:
    """Exact optimum by walking all 2^n - 1 non-empty open sets.

    Ties go to the open set whose sorted index list is lexicographically
    smallest.
    """
    if inst.n > MAX_BRUTE_FORCE_N:
        raise InstanceTooLargeError(
            f"exhaustive search needs n <= {MAX_BRUTE_FORCE_N}, instance has n={inst.n}")
    obj, mask, count = K.gray_enumerate(inst.f, inst.c)
    return ExactResult(int(obj), _mask_to_bits(int(mask), inst.n), int(count))


def brute_force_naive(inst: Instance) -> ExactResult:
    """Plain enumeration with full re-evaluation; slow, kept as a cross-check."""
    if inst.n > MAX_BRUTE_FORCE_N:
        raise InstanceTooLargeError(
            f"exhaustive search needs n <= {MAX_BRUTE_FORCE_N}, instance has n={inst.n}")
    best = None
    count = 0
    for bits in itertools.product((False, True), repeat=inst.n):
        if not any(bits):
            continue
        count += 1
        key = (evaluate_full(inst, bits), _set_key(bits))
        if best is None or key < best[0]:
            best = (key, bits)
    (obj, _), bits = best
    return ExactResult(obj, np.array(bits, dtype=bool), count)


def _linear(terms) -> str:
    out = []
    for coef, var in terms:
        out.append(var if coef == 1 else f"{coef} {var}")
    return " + ".join(out)


def export_lp(inst: Instance, sink: TextIO | None = None) -> str:
    """Write the assignment ILP in CPLEX LP format.

    y<i> opens facility i, x<i>_<j> serves customer j from facility i
    (both 1-based). Every customer is served exactly once and only from an
    open facility.
    """
    n, m = inst.n, inst.m
    f = inst.f.tolist()
    c = inst.c.tolist()
    terms = [(f[i], f"y{i + 1}") for i in range(n)]
    terms += [(c[i][j], f"x{i + 1}_{j + 1}") for i in range(n) for j in range(m)]
    lines = ["Minimize", f"obj: {_linear(terms)}", "Subject To"]
    for j in range(1, m + 1):
        lines.append(f"assign_{j}: " + " + ".join(f"x{i}_{j}" for i in range(1, n + 1)) + " = 1")
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            lines.append(f"link_{i}_{j}: x{i}_{j} - y{i} <= 0")
    lines.append("Binary")
    lines.extend(f"y{i}" for i in range(1, n + 1))
    lines.extend(f"x{i}_{j}" for i in range(1, n + 1) for j in range(1, m + 1))
    lines.append("End")
    text = "\n".join(lines) + "\n"
    if sink is not None:
        sink.write(text)
    return text


def parse_open_set(n: int, source: str | TextIO) -> np.ndarray:
    text = source if isinstance(source, str) else source.read()
    tokens = text.split()
    if len(tokens) != n:
        raise SolutionFormatError(f"expected {n} tokens, got {len(tokens)}")
    bad = [t for t in tokens if t not in ("0", "1")]
    if bad:
        raise SolutionFormatError(f"non-binary token {bad[0]!r}")
    bits = np.array([t == "1" for t in tokens], dtype=bool)
    if not bits.any():
        raise EmptyOpenSetError("solution opens no facility")
    return bits


def import_open_set(inst: Instance, source: str | TextIO) -> tuple[np.ndarray, int]:
    """Read an externally found open set (n 0/1 tokens) and evaluate it."""
    bits = parse_open_set(inst.n, source)
    return bits, evaluate_full(inst, bits)


def format_open_set(bits) -> str:
    return " ".join("1" if b else "0" for b in bits)
