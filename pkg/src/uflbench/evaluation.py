"""Objective evaluation and the incrementally maintained search state.

Facility indices are 0-based throughout the Python API.
"""

from __future__ import annotations

import numpy as np

from . import _kernels as K
from .instance import Instance


class InfeasibleFlipError(ValueError):
    """Raised when a flip would close the last open facility."""


class EmptyOpenSetError(ValueError):
    pass


def evaluate_full(inst: Instance, open_set) -> int:
    """Objective of an open set, computed from scratch (no incremental state)."""
    mask = np.asarray(open_set, dtype=bool)
    if mask.shape != (inst.n,):
        raise ValueError(f"open set has shape {mask.shape}, expected ({inst.n},)")
    if not mask.any():
        raise EmptyOpenSetError("at least one facility must be open")
    return int(inst.f[mask].sum() + inst.c[mask].min(axis=0).sum())


class SearchState:
    """A feasible open set together with its nearest-open-facility assignment.

    Customers are served by their cheapest open facility, lowest index on
    ties, and the tracked objective always equals ``evaluate_full``.
    """

    def __init__(self, inst: Instance):
        n, m = inst.n, inst.m
        self.inst = inst
        self._open = np.empty(n, np.uint8)
        self._assign = np.empty(m, np.int64)
        self._members = np.empty((n, m), np.int64)
        self._mcount = np.empty(n, np.int64)
        self._pos = np.empty(m, np.int64)
        self._acc = np.empty(2, np.int64)
        K.init_all_open(inst.f, inst.c, self._open, self._assign, self._members,
                        self._mcount, self._pos, self._acc)

    @classmethod
    def all_open(cls, inst: Instance) -> "SearchState":
        return cls(inst)

    @classmethod
    def from_open_set(cls, inst: Instance, open_set) -> "SearchState":
        """Reach an arbitrary non-empty open set by closing facilities one at a time."""
        mask = np.asarray(open_set, dtype=bool)
        if not mask.any():
            raise EmptyOpenSetError("at least one facility must be open")
        state = cls(inst)
        for i in np.flatnonzero(~mask):
            state.apply_flip(int(i))
        return state

    @property
    def open(self) -> np.ndarray:
        return self._open.astype(bool)

    @property
    def assign(self) -> np.ndarray:
        return self._assign.copy()

    @property
    def objective(self) -> int:
        return int(self._acc[0])

    @property
    def open_count(self) -> int:
        return int(self._acc[1])

    def members(self, i: int) -> list[int]:
        return sorted(self._members[i, : self._mcount[i]].tolist())

    def _check_index(self, i: int) -> int:
        if not 0 <= i < self.inst.n:
            raise IndexError(f"facility index {i} out of range [0, {self.inst.n})")
        return int(i)

    def delta_flip(self, i: int) -> int | None:
        """Objective change of toggling facility i, or None if it would close the last one."""
        i = self._check_index(i)
        d = K.delta_flip(self.inst.f, self.inst.c, self._open, self._assign,
                         self._members, self._mcount, self._acc, i)
        return None if d == K.INFEASIBLE else int(d)

    def apply_flip(self, i: int) -> int:
        i = self._check_index(i)
        if self._open[i] and self._acc[1] == 1:
            raise InfeasibleFlipError(f"cannot close facility {i}: it is the only open one")
        return int(K.apply_flip(self.inst.f, self.inst.c, self._open, self._assign,
                                self._members, self._mcount, self._pos, self._acc, i))

    def check_invariants(self) -> None:
        """Re-verify every structural invariant by brute force; raises AssertionError."""
        inst = self.inst
        mask = self.open
        assert mask.sum() == self.open_count >= 1
        costs = np.where(mask[:, None], inst.c, np.iinfo(np.int64).max)
        assert np.array_equal(self._assign, costs.argmin(axis=0))
        seen = np.zeros(inst.m, dtype=int)
        for i in range(inst.n):
            for j in self._members[i, : self._mcount[i]]:
                assert self._assign[j] == i
                seen[j] += 1
        assert (seen == 1).all()
        assert self.objective == evaluate_full(inst, mask)

    def __repr__(self):
        return f"SearchState(open={np.flatnonzero(self._open).tolist()}, objective={self.objective})"


def init_all_open(inst: Instance) -> SearchState:
    return SearchState(inst)


def delta_flip(state: SearchState, i: int) -> int | None:
    return state.delta_flip(i)


def apply_flip(state: SearchState, i: int) -> SearchState:
    state.apply_flip(i)
    return state
