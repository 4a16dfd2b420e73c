"""Magic squares (CSPLib prob019).

The ``side**2`` variables are the cells in row-major order.  Each of the
``side`` rows, ``side`` columns and two diagonals carries the error
``line_sum - side*(side**2+1)/2``; cost is the sum of their absolute values.

Kernel state layout: row sums, then column sums, then the main diagonal and
the anti-diagonal.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from adaptive_search.model import ProblemModel

KIND = 2


@njit(cache=True)
def ms_init(data, config, state):
    side = data[0]
    target = data[1]
    state[:] = 0
    for p in range(side * side):
        r = p // side
        c = p - r * side
        v = config[p]
        state[r] += v
        state[side + c] += v
        if r == c:
            state[2 * side] += v
        if r + c == side - 1:
            state[2 * side + 1] += v
    cost = 0
    for k in range(2 * side + 2):
        cost += abs(state[k] - target)
    return cost


@njit(cache=True)
def _line_delta(s, change, target):
    return abs(s + change - target) - abs(s - target)


@njit(cache=True)
def ms_swap_cost(data, config, state, cost, i, j):
    side = data[0]
    target = data[1]
    dv = config[j] - config[i]  # cell i gains dv, cell j loses it
    if dv == 0:
        return cost
    ri = i // side
    ci = i - ri * side
    rj = j // side
    cj = j - rj * side
    delta = 0
    if ri != rj:
        delta += _line_delta(state[ri], dv, target) + _line_delta(state[rj], -dv, target)
    if ci != cj:
        delta += _line_delta(state[side + ci], dv, target) + _line_delta(state[side + cj], -dv, target)
    dchange = 0
    if ri == ci:
        dchange += dv
    if rj == cj:
        dchange -= dv
    if dchange != 0:
        delta += _line_delta(state[2 * side], dchange, target)
    achange = 0
    if ri + ci == side - 1:
        achange += dv
    if rj + cj == side - 1:
        achange -= dv
    if achange != 0:
        delta += _line_delta(state[2 * side + 1], achange, target)
    return cost + delta


@njit(cache=True)
def ms_apply_swap(data, config, state, cost, i, j):
    side = data[0]
    new_cost = ms_swap_cost(data, config, state, cost, i, j)
    dv = config[j] - config[i]
    ri = i // side
    ci = i - ri * side
    rj = j // side
    cj = j - rj * side
    state[ri] += dv
    state[rj] -= dv
    state[side + ci] += dv
    state[side + cj] -= dv
    if ri == ci:
        state[2 * side] += dv
    if rj == cj:
        state[2 * side] -= dv
    if ri + ci == side - 1:
        state[2 * side + 1] += dv
    if rj + cj == side - 1:
        state[2 * side + 1] -= dv
    tmp = config[i]
    config[i] = config[j]
    config[j] = tmp
    return new_cost


@njit(cache=True)
def ms_errors(data, config, state, out):
    side = data[0]
    target = data[1]
    for p in range(side * side):
        r = p // side
        c = p - r * side
        e = abs(state[r] - target) + abs(state[side + c] - target)
        if r == c:
            e += abs(state[2 * side] - target)
        if r + c == side - 1:
            e += abs(state[2 * side + 1] - target)
        out[p] = e


class MagicSquareProblem(ProblemModel):
    name = "magic-square"
    kind = KIND

    def __init__(self, side: int):
        if side < 1:
            raise ValueError(f"magic square side must be >= 1, got {side}")
        self.side = side
        self.magic_constant = side * (side * side + 1) // 2
        super().__init__(np.arange(1, side * side + 1), [side, self.magic_constant], 2 * side + 2)

    def describe(self) -> dict:
        return {"name": self.name, "side": self.side, "n": self.n}
