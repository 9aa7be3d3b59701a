"""Compiled inner loops shared by the search state and the two local searches.

State layout (all arrays owned by one SearchState or one run):
  is_open  uint8[n]
  assign   int64[m]      facility serving each customer
  members  int64[n, m]  members[i, :mcount[i]] are the customers of i
  mcount   int64[n]
  pos      int64[m]      slot of customer j inside members[assign[j]]
  acc      int64[2]      (objective, open_count)
"""

import numpy as np
from numba import njit

from .instance import GAMMA, MIX1, MIX2

INFEASIBLE = np.int64(1 << 62)

_GAMMA = np.uint64(GAMMA)
_MIX1 = np.uint64(MIX1)
_MIX2 = np.uint64(MIX2)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)



@njit(cache=True, nogil=True)
def splitmix_next(state):
    state = state + _GAMMA
    z = state
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return state, z ^ (z >> _S31)


@njit(cache=True, nogil=True)
def init_all_open(f, c, is_open, assign, members, mcount, pos, acc):
    n, m = c.shape
    obj = 0
    for i in range(n):
        is_open[i] = 1
        mcount[i] = 0
        obj += f[i]
    for j in range(m):
        best = 0
        for i in range(1, n):
            if c[i, j] < c[best, j]:
                best = i
        assign[j] = best
        pos[j] = mcount[best]
        members[best, mcount[best]] = j
        mcount[best] += 1
        obj += c[best, j]
    acc[0] = obj
    acc[1] = n


@njit(cache=True, nogil=True)
def _best_other(c, is_open, j, skip):
    n = c.shape[0]
    best = -1
    for k in range(n):
        if k != skip and is_open[k] and (best < 0 or c[k, j] < c[best, j]):
            best = k
    return best


@njit(cache=True, nogil=True)
def delta_flip(f, c, is_open, assign, members, mcount, acc, i):
    m = c.shape[1]
    if is_open[i]:
        if acc[1] == 1:
            return INFEASIBLE
        d = -f[i]
        for s in range(mcount[i]):
            j = members[i, s]
            d += c[_best_other(c, is_open, j, i), j] - c[i, j]
        return d
    d = f[i]
    for j in range(m):
        diff = c[i, j] - c[assign[j], j]
        if diff < 0:
            d += diff
    return d


@njit(cache=True, nogil=True)
def _move(members, mcount, pos, assign, j, target):
    src = assign[j]
    last = members[src, mcount[src] - 1]
    members[src, pos[j]] = last
    pos[last] = pos[j]
    mcount[src] -= 1
    assign[j] = target
    pos[j] = mcount[target]
    members[target, mcount[target]] = j
    mcount[target] += 1


@njit(cache=True, nogil=True)
def apply_flip(f, c, is_open, assign, members, mcount, pos, acc, i):
    """Toggle facility i and repair the assignment. Returns the objective change."""
    m = c.shape[1]
    if is_open[i]:
        if acc[1] == 1:
            return INFEASIBLE
        is_open[i] = 0
        acc[1] -= 1
        d = -f[i]
        while mcount[i] > 0:
            j = members[i, mcount[i] - 1]
            k = _best_other(c, is_open, j, i)
            d += c[k, j] - c[i, j]
            _move(members, mcount, pos, assign, j, k)
    else:
        is_open[i] = 1
        acc[1] += 1
        d = f[i]
        for j in range(m):
            a = assign[j]
            # ties go to the lower index so the assignment stays canonical
            if c[i, j] < c[a, j] or (c[i, j] == c[a, j] and i < a):
                d += c[i, j] - c[a, j]
                _move(members, mcount, pos, assign, j, i)
    acc[0] += d
    return d


@njit(cache=True, nogil=True)
def ls_run(f, c, moves, objs):
    """Steepest descent from all-open; at most n iterations, strict improvement only.

    Returns (initial objective, iterations used, accepted moves). Accepted
    moves are written to moves/objs.
    """
    n, m = c.shape
    is_open = np.empty(n, np.uint8)
    assign = np.empty(m, np.int64)
    members = np.empty((n, m), np.int64)
    mcount = np.empty(n, np.int64)
    pos = np.empty(m, np.int64)
    acc = np.empty(2, np.int64)
    init_all_open(f, c, is_open, assign, members, mcount, pos, acc)
    initial = acc[0]
    accepted = 0
    iterations = 0
    for it in range(n):
        iterations += 1
        best_i = -1
        best_d = INFEASIBLE
        for i in range(n):
            d = delta_flip(f, c, is_open, assign, members, mcount, acc, i)
            if d < best_d:
                best_d = d
                best_i = i
        if best_i < 0 or best_d >= 0:
            break
        apply_flip(f, c, is_open, assign, members, mcount, pos, acc, best_i)
        moves[accepted] = best_i
        objs[accepted] = acc[0]
        accepted += 1
    return initial, iterations, accepted


@njit(cache=True, nogil=True)
def rls_run(f, c, seed, moves, objs, iters):
    """Randomised local search from all-open for exactly n^2 proposals.

    Returns (initial objective, iterations used, accepted moves).
    """
    n, m = c.shape
    is_open = np.empty(n, np.uint8)
    assign = np.empty(m, np.int64)
    members = np.empty((n, m), np.int64)
    mcount = np.empty(n, np.int64)
    pos = np.empty(m, np.int64)
    acc = np.empty(2, np.int64)
    init_all_open(f, c, is_open, assign, members, mcount, pos, acc)
    initial = acc[0]
    state = seed
    nn = np.uint64(n)
    budget = n * n
    accepted = 0
    for it in range(budget):
        state, z = splitmix_next(state)
        i = np.int64(z % nn)
        d = delta_flip(f, c, is_open, assign, members, mcount, acc, i)
        if d <= 0:
            apply_flip(f, c, is_open, assign, members, mcount, pos, acc, i)
            moves[accepted] = i
            objs[accepted] = acc[0]
            iters[accepted] = it + 1
            accepted += 1
    return initial, budget, accepted



@njit(cache=True, nogil=True)
def _set_precedes(a, b):
    # compare open sets as ascending lists of facility indices
    d = a ^ b
    low = d & -d
    if a & low:
        return (b & ~(2 * low - 1)) != 0
    return (a & ~(2 * low - 1)) == 0


@njit(cache=True, nogil=True)
def gray_enumerate(f, c):
    """Visit every non-empty open set by single flips (reflected Gray code offset
    by the top bit, which never reaches the empty set). Returns (best objective,
    best mask, sets visited)."""
    n, m = c.shape
    is_open = np.empty(n, np.uint8)
    assign = np.empty(m, np.int64)
    members = np.empty((n, m), np.int64)
    mcount = np.empty(n, np.int64)
    pos = np.empty(m, np.int64)
    acc = np.empty(2, np.int64)
    init_all_open(f, c, is_open, assign, members, mcount, pos, acc)
    for i in range(n - 1):
        apply_flip(f, c, is_open, assign, members, mcount, pos, acc, i)
    mask = np.int64(1) << (n - 1)
    best_obj = acc[0]
    best_mask = mask
    total = (np.int64(1) << n) - 1
    for k in range(1, total):
        bit = 0
        while not (k >> bit) & 1:
            bit += 1
        apply_flip(f, c, is_open, assign, members, mcount, pos, acc, bit)
        mask ^= np.int64(1) << bit
        if acc[0] < best_obj or (acc[0] == best_obj and _set_precedes(mask, best_mask)):
            best_obj = acc[0]
            best_mask = mask
    return best_obj, best_mask, total
