"""Solution checks written without reference to the cost kernels.

These use plain Python (and a cell grid for perfect squares) so that a bug
in an incremental cost cannot vouch for itself.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from adaptive_search.model import ProblemModel
from adaptive_search.problems.all_interval import AllIntervalProblem
from adaptive_search.problems.magic_square import MagicSquareProblem
from adaptive_search.problems.partition import PartitionProblem
from adaptive_search.problems.perfect_square import PerfectSquareProblem


def is_all_interval_series(seq: Sequence[int]) -> bool:
    values = [int(v) for v in seq]
    n = len(values)
    if sorted(values) != list(range(n)):
        return False
    diffs = {abs(a - b) for a, b in zip(values, values[1:])}
    return diffs == set(range(1, n))


def is_balanced_partition(seq: Sequence[int]) -> bool:
    values = [int(v) for v in seq]
    n = len(values)
    if n % 2 or sorted(values) != list(range(1, n + 1)):
        return False
    a, b = values[: n // 2], values[n // 2 :]
    return sum(a) == sum(b) and sum(x * x for x in a) == sum(x * x for x in b)


def is_magic_square(seq: Sequence[int], side: int) -> bool:
    values = [int(v) for v in seq]
    if sorted(values) != list(range(1, side * side + 1)):
        return False
    rows = [values[r * side : (r + 1) * side] for r in range(side)]
    lines = rows + [list(col) for col in zip(*rows)]
    lines.append([rows[k][k] for k in range(side)])
    lines.append([rows[k][side - 1 - k] for k in range(side)])
    return len({sum(line) for line in lines}) == 1


def is_perfect_packing(order: Sequence[int], master: int, sizes: Sequence[int]) -> bool:
    """Drop squares bottom-left onto a cell grid and check the master is tiled."""
    order = [int(s) for s in order]
    if sorted(order) != sorted(int(s) for s in sizes):
        return False
    grid = np.zeros((master, master), dtype=np.int32)  # grid[y, x]
    for s in order:
        free = np.argwhere(grid == 0)
        if free.size == 0:
            return False
        # lowest row first, then leftmost column
        y, x = min((int(p[0]), int(p[1])) for p in free)
        if y + s > master or x + s > master:
            return False
        if grid[y : y + s, x : x + s].any():
            return False
        grid[y : y + s, x : x + s] += 1
    return bool((grid == 1).all())


def validate(model: ProblemModel, config: Sequence[int]) -> bool:
    """True iff ``config`` is a genuine solution of ``model``."""
    if len(config) != model.n:
        return False
    if isinstance(model, AllIntervalProblem):
        return is_all_interval_series(config)
    if isinstance(model, PartitionProblem):
        return is_balanced_partition(config)
    if isinstance(model, MagicSquareProblem):
        return is_magic_square(config, model.side)
    if isinstance(model, PerfectSquareProblem):
        return is_perfect_packing(config, model.master_size, model.square_sizes)
    raise TypeError(f"no validator for {type(model).__name__}")
