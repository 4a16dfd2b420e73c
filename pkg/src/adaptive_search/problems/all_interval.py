"""All-interval series (CSPLib prob007).

Find a permutation of ``0..n-1`` whose consecutive absolute differences are
themselves a permutation of ``1..n-1``.  The kernel state is the occurrence
count of every difference value.

Two cost functions are available, both zero exactly at solutions:

``missing`` (default)
    the number of interval values in ``1..n-1`` that never occur, which
    equals the total duplicate excess over the ``n-1`` differences.
``largest-missing``
    the largest interval value that never occurs (0 if none).  It ranks
    configurations by how far down the hard, long intervals are already
    in place and leaves wide plateaus among the short ones.  Paired with
    the engine's pair-scanning mode it scales far better.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from adaptive_search.model import ProblemModel

KIND = 0

COST_MISSING = 0
COST_LARGEST_MISSING = 1
COST_NAMES = {"missing": COST_MISSING, "largest-missing": COST_LARGEST_MISSING}


@njit(cache=True)
def _top_missing(occ, start):
    d = start
    while d > 0 and occ[d] > 0:
        d -= 1
    return d


@njit(cache=True)
def ai_init(data, config, state):
    n = config.shape[0]
    state[:] = 0
    for k in range(n - 1):
        state[abs(config[k] - config[k + 1])] += 1
    if data[1] == COST_LARGEST_MISSING:
        return _top_missing(state, n - 1)
    missing = 0
    for d in range(1, n):
        if state[d] == 0:
            missing += 1
    return missing


@njit(cache=True)
def _value_after_swap(config, p, i, j):
    if p == i:
        return config[j]
    if p == j:
        return config[i]
    return config[p]


@njit(cache=True)
def _touched(i, j, n, ks):
    # differences changed by swapping positions i and j, without repeats;
    # difference k sits between positions k and k+1
    m = 0
    for k in (i - 1, i, j - 1, j):
        if k < 0 or k >= n - 1:
            continue
        dup = False
        for u in range(m):
            if ks[u] == k:
                dup = True
        if not dup:
            ks[m] = k
            m += 1
    return m


@njit(cache=True)
def _swap_occ(config, occ, i, j, ks, removed):
    """Update ``occ`` as if i and j were swapped (``config`` untouched).

    Differences whose count drops to zero go to ``removed``.  Returns the
    number of those and the number of values that became present.
    """
    m = _touched(i, j, config.shape[0], ks)
    nrem = 0
    for t in range(m):
        k = ks[t]
        d = abs(config[k] - config[k + 1])
        occ[d] -= 1
        if occ[d] == 0:
            removed[nrem] = d
            nrem += 1
    added = 0
    for t in range(m):
        k = ks[t]
        d = abs(_value_after_swap(config, k, i, j) - _value_after_swap(config, k + 1, i, j))
        if occ[d] == 0:
            added += 1
        occ[d] += 1
    return nrem, added


@njit(cache=True)
def _undo_occ(config, occ, i, j, ks):
    m = _touched(i, j, config.shape[0], ks)
    for t in range(m):
        k = ks[t]
        occ[abs(_value_after_swap(config, k, i, j) - _value_after_swap(config, k + 1, i, j))] -= 1
        occ[abs(config[k] - config[k + 1])] += 1


@njit(cache=True)
def _cost_after(data, occ, cost, removed, nrem, added):
    if data[1] == COST_MISSING:
        return cost + nrem - added
    # Every value above the old top was present before the swap, so a new
    # gap up there can only be one of the removed differences.
    top = cost
    if top > 0 and occ[top] > 0:
        top = _top_missing(occ, top - 1)
    for t in range(nrem):
        d = removed[t]
        if occ[d] == 0 and d > top:
            top = d
    return top


@njit(cache=True)
def ai_swap_cost(data, config, state, cost, i, j):
    if i == j:
        return cost
    ks = np.empty(4, np.int64)
    removed = np.empty(4, np.int64)
    nrem, added = _swap_occ(config, state, i, j, ks, removed)
    c = _cost_after(data, state, cost, removed, nrem, added)
    _undo_occ(config, state, i, j, ks)
    return c


@njit(cache=True)
def ai_apply_swap(data, config, state, cost, i, j):
    if i == j:
        return cost
    ks = np.empty(4, np.int64)
    removed = np.empty(4, np.int64)
    nrem, added = _swap_occ(config, state, i, j, ks, removed)
    c = _cost_after(data, state, cost, removed, nrem, added)
    tmp = config[i]
    config[i] = config[j]
    config[j] = tmp
    return c


@njit(cache=True)
def ai_errors(data, config, state, out):
    # A difference value's term costs occ-1; a variable's error sums the
    # distinct terms of its (at most two) adjacent differences.
    n = config.shape[0]
    for p in range(n):
        e = 0
        left = -1
        if p > 0:
            left = abs(config[p - 1] - config[p])
            e += state[left] - 1
        if p < n - 1:
            right = abs(config[p] - config[p + 1])
            if right != left:
                e += state[right] - 1
        out[p] = e


class AllIntervalProblem(ProblemModel):
    name = "all-interval"
    kind = KIND
    uniform_role = True

    def __init__(self, n: int, cost: str = "missing"):
        if n < 2:
            raise ValueError(f"all-interval series needs n >= 2, got {n}")
        if cost not in COST_NAMES:
            raise ValueError(f"unknown all-interval cost {cost!r}; choose from {', '.join(COST_NAMES)}")
        self.cost_name = cost
        super().__init__(np.arange(n), [n, COST_NAMES[cost]], state_size=n)

    def describe(self) -> dict:
        return {"name": self.name, "n": self.n, "cost": self.cost_name}

    @staticmethod
    def trivial_solution(n: int) -> np.ndarray:
        """The zig-zag series ``0, n-1, 1, n-2, ...``."""
        lo, hi = 0, n - 1
        out = []
        for t in range(n):
            if t % 2 == 0:
                out.append(lo)
                lo += 1
            else:
                out.append(hi)
                hi -= 1
        return np.array(out, dtype=np.int64)
