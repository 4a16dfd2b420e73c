"""Dispatch from a model ``kind`` to its compiled kernels.

Every problem provides the same four kernels over ``(data, config, state)``:
``init`` (fill the incremental state, return the cost), ``errors``
(per-variable error projection), ``swap_cost`` (cost after a swap, nothing
mutated) and ``apply_swap`` (swap in place, update the state, return the
new cost).  ``partners`` lists the positions a culprit may swap with.

Dispatching on an integer keeps the engine a single cacheable compiled
function; jitted callables passed as arguments defeat numba's disk cache.
"""

from __future__ import annotations

from numba import njit

from adaptive_search.problems.all_interval import ai_apply_swap, ai_errors, ai_init, ai_swap_cost
from adaptive_search.problems.magic_square import ms_apply_swap, ms_errors, ms_init, ms_swap_cost
from adaptive_search.problems.partition import (
    pp_apply_swap,
    pp_errors,
    pp_init,
    pp_partners,
    pp_swap_cost,
)
from adaptive_search.problems.perfect_square import ps_apply_swap, ps_errors, ps_init, ps_swap_cost

ALL_INTERVAL = 0
PARTITION = 1
MAGIC_SQUARE = 2
PERFECT_SQUARE = 3


@njit(cache=True)
def init_cost(kind, data, config, state):
    if kind == ALL_INTERVAL:
        return ai_init(data, config, state)
    elif kind == PARTITION:
        return pp_init(data, config, state)
    elif kind == MAGIC_SQUARE:
        return ms_init(data, config, state)
    else:
        return ps_init(data, config, state)


@njit(cache=True)
def var_errors(kind, data, config, state, out):
    if kind == ALL_INTERVAL:
        ai_errors(data, config, state, out)
    elif kind == PARTITION:
        pp_errors(data, config, state, out)
    elif kind == MAGIC_SQUARE:
        ms_errors(data, config, state, out)
    else:
        ps_errors(data, config, state, out)


@njit(cache=True)
def swap_cost(kind, data, config, state, cost, i, j):
    if kind == ALL_INTERVAL:
        return ai_swap_cost(data, config, state, cost, i, j)
    elif kind == PARTITION:
        return pp_swap_cost(data, config, state, cost, i, j)
    elif kind == MAGIC_SQUARE:
        return ms_swap_cost(data, config, state, cost, i, j)
    else:
        return ps_swap_cost(data, config, state, cost, i, j)


@njit(cache=True)
def apply_swap(kind, data, config, state, cost, i, j):
    if kind == ALL_INTERVAL:
        return ai_apply_swap(data, config, state, cost, i, j)
    elif kind == PARTITION:
        return pp_apply_swap(data, config, state, cost, i, j)
    elif kind == MAGIC_SQUARE:
        return ms_apply_swap(data, config, state, cost, i, j)
    else:
        return ps_apply_swap(data, config, state, cost, i, j)


@njit(cache=True)
def partners(kind, data, config, culprit, out):
    if kind == PARTITION:
        return pp_partners(data, config, culprit, out)
    m = 0
    for j in range(config.shape[0]):
        if j != culprit:
            out[m] = j
            m += 1
    return m
