"""Problem instances, the seeded generator models and the instance text format."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB


class InstanceError(ValueError):
    """Invalid instance data or dimensions."""


class ParseError(InstanceError):
    """Base class for instance text format errors."""


class HeaderError(ParseError):
    pass


class RowLengthError(ParseError):
    pass


class TokenError(ParseError):
    pass


class InvariantError(ParseError):
    pass


def splitmix64_mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


class Rng64:
    """splitmix64 generator. Pure state machine: equal seeds give equal streams."""

    __slots__ = ("state",)

    def __init__(self, seed: int = 0):
        self.state = int(seed) & MASK64

    def next(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return splitmix64_mix(self.state)

    def uniform_int(self, lo: int, hi: int) -> int:
        if lo > hi:
            raise ValueError(f"invalid range [{lo}, {hi}]")
        span = hi - lo + 1
        if span > 1 << 32:
            raise ValueError(f"range [{lo}, {hi}] wider than 2^32")
        return lo + self.next() % span

    def next_array(self, count: int) -> np.ndarray:
        """The next ``count`` outputs as a uint64 array; advances the state."""
        # state after k steps is seed + k * GAMMA, so the block is closed-form
        steps = np.arange(1, count + 1, dtype=np.uint64)
        z = np.uint64(self.state) + steps * np.uint64(GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
        z = z ^ (z >> np.uint64(31))
        self.state = (self.state + count * GAMMA) & MASK64
        return z

    def uniform_int_array(self, lo: int, hi: int, count: int) -> np.ndarray:
        if lo > hi:
            raise ValueError(f"invalid range [{lo}, {hi}]")
        span = hi - lo + 1
        if span > 1 << 32:
            raise ValueError(f"range [{lo}, {hi}] wider than 2^32")
        return (self.next_array(count) % np.uint64(span)).astype(np.int64) + lo


def rng_next(rng: Rng64) -> int:
    return rng.next()


def rng_uniform_int(rng: Rng64, lo: int, hi: int) -> int:
    return rng.uniform_int(lo, hi)


class Model(enum.IntEnum):
    MODEL1 = 1
    MODEL2 = 2
    MODEL3 = 3
    MODEL4 = 4


@dataclass(frozen=True)
class ModelId:
    model: Model
    k: int = 10
    lam: int = 1

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        if self.k < 1 or not 0 <= self.lam <= self.k:
            raise ValueError(f"need k >= 1 and 0 <= lambda <= k, got k={self.k}, lambda={self.lam}")

    @classmethod
    def of(cls, value: "ModelId | Model | int") -> "ModelId":
        return value if isinstance(value, ModelId) else cls(Model(value))


@dataclass(frozen=True, eq=False)
class Instance:
    f: np.ndarray
    c: np.ndarray
    comments: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        f = np.array(self.f, dtype=np.int64)
        c = np.array(self.c, dtype=np.int64)
        if f.ndim != 1 or c.ndim != 2:
            raise InstanceError("f must be a vector and c a matrix")
        if f.shape[0] < 1 or c.shape[1] < 1:
            raise InstanceError(f"need n >= 1 and m >= 1, got n={f.shape[0]}, m={c.shape[1]}")
        if c.shape[0] != f.shape[0]:
            raise InstanceError(f"cost matrix has {c.shape[0]} rows for {f.shape[0]} facilities")
        if (f < 0).any():
            raise InstanceError("facility costs must be non-negative")
        if (c < 1).any():
            raise InstanceError("service costs must be >= 1")
        f.flags.writeable = False
        c.flags.writeable = False
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return self.f.shape[0]

    @property
    def m(self) -> int:
        return self.c.shape[1]

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return np.array_equal(self.f, other.f) and np.array_equal(self.c, other.c)

    def __hash__(self):
        return hash((self.f.tobytes(), self.c.shape, self.c.tobytes()))

    def __repr__(self):
        return f"Instance(n={self.n}, m={self.m})"


def generate(model: ModelId | Model | int, n: int, m: int, seed: int) -> Instance:
    """Draw an instance from one of the four cost models.

    All values come from one splitmix64 stream: the n facility costs first,
    then the cost matrix row by row.
    """
    model = ModelId.of(model)
    if n < 1 or m < 1:
        raise InstanceError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    rng = Rng64(seed)
    kind = model.model
    if kind in (Model.MODEL1, Model.MODEL4):
        f = np.ones(n, dtype=np.int64)
    else:
        f = rng.uniform_int_array(1, 2, n)

    if kind == Model.MODEL1:
        c = rng.uniform_int_array(1, 10, n * m)
    elif kind == Model.MODEL2:
        c = np.where(rng.uniform_int_array(1, 10, n * m) == 1, 1, 10)
    elif kind == Model.MODEL3:
        c = rng.uniform_int_array(1, 2, n * m)
    else:
        # success iff a draw from {0..k-1} lands below lambda: p = lambda / k
        trials = rng.uniform_int_array(0, model.k - 1, n * m * model.k)
        c = 1 + (trials.reshape(n * m, model.k) < model.lam).sum(axis=1)
    return Instance(f, c.reshape(n, m))


def write_instance(inst: Instance, sink: TextIO | None = None, comments: Iterable[str] = ()) -> str:
    lines = [f"# {text}" for text in comments]
    lines.append(f"{inst.n} {inst.m}")
    lines.append(" ".join(map(str, inst.f.tolist())))
    lines.extend(" ".join(map(str, row)) for row in inst.c.tolist())
    text = "\n".join(lines) + "\n"
    if sink is not None:
        sink.write(text)
    return text


def _ints(line: str, lineno: int) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        bad = next(tok for tok in line.split() if not tok.lstrip("+-").isdigit())
        raise TokenError(f"line {lineno}: non-integer token {bad!r}") from None


def parse_instance(source: str | TextIO) -> Instance:
    text = source if isinstance(source, str) else source.read()
    comments = []
    data = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        stripped = line.strip()
        if stripped.startswith("#"):
            if data:
                raise ParseError(f"line {lineno}: comments are only allowed before the header")
            comments.append(stripped[1:].strip())
        elif stripped:
            data.append((lineno, stripped))
    if not data:
        raise HeaderError("missing 'n m' header")

    lineno, header = data[0]
    dims = _ints(header, lineno)
    if len(dims) != 2 or dims[0] < 1 or dims[1] < 1:
        raise HeaderError(f"line {lineno}: expected 'n m' with n, m >= 1, got {header!r}")
    n, m = dims
    if len(data) != n + 2:
        raise RowLengthError(f"expected {n + 2} data lines, found {len(data)}")

    lineno, line = data[1]
    f = _ints(line, lineno)
    if len(f) != n:
        raise RowLengthError(f"line {lineno}: expected {n} facility costs, got {len(f)}")
    rows = []
    for lineno, line in data[2:]:
        row = _ints(line, lineno)
        if len(row) != m:
            raise RowLengthError(f"line {lineno}: expected {m} costs, got {len(row)}")
        rows.append(row)
    if any(v < 0 for v in f):
        raise InvariantError("facility costs must be non-negative")
    if any(v < 1 for row in rows for v in row):
        raise InvariantError("service costs must be >= 1")
    return Instance(f, rows, comments=tuple(comments))
