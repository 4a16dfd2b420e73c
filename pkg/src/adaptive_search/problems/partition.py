"""Number partitioning with equal sums and equal sums of squares.

Positions ``0..n/2-1`` form group A, the rest group B.  Only the sums of
group A are tracked; group B's follow from the totals.  Cost is
``|sum(A) - n(n+1)/4| + |sumsq(A) - n(n+1)(2n+1)/12|``.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from adaptive_search.model import ProblemModel

KIND = 1


class InvalidInstance(ValueError):
    pass


@njit(cache=True)
def _cost(data, s, q):
    return abs(s - data[2]) + abs(q - data[3])


@njit(cache=True)
def pp_init(data, config, state):
    half = data[1]
    s = 0
    q = 0
    for k in range(half):
        v = config[k]
        s += v
        q += v * v
    state[0] = s
    state[1] = q
    return _cost(data, s, q)


@njit(cache=True)
def pp_swap_cost(data, config, state, cost, i, j):
    half = data[1]
    if (i < half) == (j < half):
        return cost
    if i < half:
        a = config[i]
        b = config[j]
    else:
        a = config[j]
        b = config[i]
    return _cost(data, state[0] - a + b, state[1] - a * a + b * b)


@njit(cache=True)
def pp_apply_swap(data, config, state, cost, i, j):
    half = data[1]
    if (i < half) != (j < half):
        if i < half:
            a = config[i]
            b = config[j]
        else:
            a = config[j]
            b = config[i]
        state[0] += b - a
        state[1] += b * b - a * a
        cost = _cost(data, state[0], state[1])
    tmp = config[i]
    config[i] = config[j]
    config[j] = tmp
    return cost


@njit(cache=True)
def pp_errors(data, config, state, out):
    # Every variable takes part in both equations.
    out[:] = _cost(data, state[0], state[1])


@njit(cache=True)
def pp_partners(data, config, culprit, out):
    half = data[1]
    lo = half if culprit < half else 0
    for t in range(half):
        out[t] = lo + t
    return half


class PartitionProblem(ProblemModel):
    name = "partition"
    kind = KIND
    uniform_role = True

    def __init__(self, n: int):
        if n <= 0 or n % 8 != 0:
            raise InvalidInstance(f"partition needs n to be a positive multiple of 8, got {n}")
        self.target_sum = n * (n + 1) // 4
        self.target_sq_sum = n * (n + 1) * (2 * n + 1) // 12
        super().__init__(
            np.arange(1, n + 1),
            [n, n // 2, self.target_sum, self.target_sq_sum],
            state_size=2,
        )

    def constraint_errors(self, config) -> tuple[int, int]:
        arr = self.as_config(config)
        group_a = arr[: self.n // 2]
        return (
            abs(int(group_a.sum()) - self.target_sum),
            abs(int((group_a * group_a).sum()) - self.target_sq_sum),
        )
