"""Perfect square placement (CSPLib prob009) in its permutation encoding.

A configuration is the order in which the squares are dropped into the
master square.  Each square goes to the lowest, then leftmost, free slot of
a skyline; placement stops at the first square that does not fit there.

The cost of a configuration that leaves squares unplaced is a weighted sum
of five criteria, in this order: number of unplaced squares, size of the
largest unplaced square, sum of the heights of the open slots, the largest
open-slot height, and the sum of the open-slot widths.  An open slot is a
skyline segment below the top of the master square; its height is the gap
up to the top.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np
from numba import njit

from adaptive_search.model import ProblemModel

KIND = 3

DEFAULT_WEIGHTS = (10, 1, 1, 1, 1)

# master size, number of squares, largest square
INSTANCE_TABLE = {
    1: (112, 21, 50),
    2: (228, 23, 99),
    3: (326, 24, 142),
    4: (479, 24, 175),
    5: (524, 25, 220),
}


class InstanceError(ValueError):
    pass


@njit(cache=True)
def _place(master, config, seg_x, seg_w, seg_h, px, py):
    """Drop squares in order onto the skyline; returns (segments, placed)."""
    n = config.shape[0]
    nseg = 1
    seg_x[0] = 0
    seg_w[0] = master
    seg_h[0] = 0
    for t in range(n):
        s = config[t]
        m = 0
        for k in range(1, nseg):
            if seg_h[k] < seg_h[m]:
                m = k
        if s > seg_w[m] or seg_h[m] + s > master:
            return nseg, t
        px[t] = seg_x[m]
        py[t] = seg_h[m]
        if s == seg_w[m]:
            seg_h[m] += s
            if m + 1 < nseg and seg_h[m + 1] == seg_h[m]:
                seg_w[m] += seg_w[m + 1]
                for k in range(m + 1, nseg - 1):
                    seg_x[k] = seg_x[k + 1]
                    seg_w[k] = seg_w[k + 1]
                    seg_h[k] = seg_h[k + 1]
                nseg -= 1
        else:
            for k in range(nseg - 1, m - 1, -1):
                seg_x[k + 1] = seg_x[k]
                seg_w[k + 1] = seg_w[k]
                seg_h[k + 1] = seg_h[k]
            seg_w[m] = s
            seg_h[m] = seg_h[m + 1] + s
            seg_x[m + 1] += s
            seg_w[m + 1] -= s
            nseg += 1
        if m > 0 and seg_h[m - 1] == seg_h[m]:
            seg_w[m - 1] += seg_w[m]
            for k in range(m, nseg - 1):
                seg_x[k] = seg_x[k + 1]
                seg_w[k] = seg_w[k + 1]
                seg_h[k] = seg_h[k + 1]
            nseg -= 1
    return nseg, n


@njit(cache=True)
def _views(state, n):
    # state: [placed, seg_x(n+1), seg_w(n+1), seg_h(n+1), px(n), py(n)]
    m = n + 1
    return (
        state[1 : 1 + m],
        state[1 + m : 1 + 2 * m],
        state[1 + 2 * m : 1 + 3 * m],
        state[1 + 3 * m : 1 + 3 * m + n],
        state[1 + 3 * m + n : 1 + 3 * m + 2 * n],
    )


@njit(cache=True)
def ps_init(data, config, state):
    master = data[0]
    n = config.shape[0]
    seg_x, seg_w, seg_h, px, py = _views(state, n)
    nseg, placed = _place(master, config, seg_x, seg_w, seg_h, px, py)
    state[0] = placed
    if placed == n:
        return 0
    biggest = 0
    for t in range(placed, n):
        if config[t] > biggest:
            biggest = config[t]
    sum_h = 0
    max_h = 0
    sum_w = 0
    for k in range(nseg):
        gap = master - seg_h[k]
        if gap > 0:
            sum_h += gap
            sum_w += seg_w[k]
            if gap > max_h:
                max_h = gap
    return data[1] * (n - placed) + data[2] * biggest + data[3] * sum_h + data[4] * max_h + data[5] * sum_w


@njit(cache=True)
def ps_swap_cost(data, config, state, cost, i, j):
    if i == j:
        return cost
    tmp = config[i]
    config[i] = config[j]
    config[j] = tmp
    placed = state[0]
    c = ps_init(data, config, state)
    state[0] = placed
    config[j] = config[i]
    config[i] = tmp
    return c


@njit(cache=True)
def ps_apply_swap(data, config, state, cost, i, j):
    tmp = config[i]
    config[i] = config[j]
    config[j] = tmp
    return ps_init(data, config, state)


@njit(cache=True)
def ps_errors(data, config, state, out):
    # Placed squares carry no error; an unplaced square's error is its size,
    # so the biggest square left out is repaired first.
    placed = state[0]
    n = config.shape[0]
    for t in range(n):
        out[t] = config[t] if t >= placed else 0


@njit(cache=True)
def _place_only(master, config):
    n = config.shape[0]
    seg_x = np.zeros(n + 1, np.int64)
    seg_w = np.zeros(n + 1, np.int64)
    seg_h = np.zeros(n + 1, np.int64)
    px = np.zeros(n, np.int64)
    py = np.zeros(n, np.int64)
    nseg, placed = _place(master, config, seg_x, seg_w, seg_h, px, py)
    return nseg, placed, seg_x, seg_w, seg_h, px, py


@dataclass
class PlacementResult:
    placed: list[tuple[int, int, int]] = field(default_factory=list)  # (size, x, y)
    unplaced: list[int] = field(default_factory=list)
    open_slots: list[tuple[int, int, int, int]] = field(default_factory=list)  # (x, y, w, h)


def greedy_place(square_order: Sequence[int], master_size: int) -> PlacementResult:
    """Place squares bottom-left on a skyline until one does not fit."""
    order = np.ascontiguousarray(square_order, dtype=np.int64)
    nseg, placed, seg_x, seg_w, seg_h, px, py = _place_only(int(master_size), order)
    result = PlacementResult()
    for t in range(placed):
        result.placed.append((int(order[t]), int(px[t]), int(py[t])))
    result.unplaced = [int(s) for s in order[placed:]]
    for k in range(nseg):
        if seg_h[k] < master_size:
            result.open_slots.append(
                (int(seg_x[k]), int(seg_h[k]), int(seg_w[k]), int(master_size - seg_h[k]))
            )
    return result


class PerfectSquareProblem(ProblemModel):
    name = "perfect-square"
    kind = KIND

    def __init__(
        self,
        master_size: int,
        square_sizes: Sequence[int],
        instance_id: int | None = None,
        weights: Sequence[int] = DEFAULT_WEIGHTS,
    ):
        sizes = [int(s) for s in square_sizes]
        if not sizes or min(sizes) < 1:
            raise InstanceError("square sizes must be positive")
        area = sum(s * s for s in sizes)
        if area != master_size * master_size:
            raise InstanceError(
                f"square areas sum to {area}, master square needs {master_size * master_size}"
            )
        if len(weights) != 5 or min(weights) < 0:
            raise InstanceError("need five non-negative weights")
        self.master_size = int(master_size)
        self.square_sizes = tuple(sorted(sizes, reverse=True))
        self.instance_id = instance_id
        self.weights = tuple(int(w) for w in weights)
        n = len(sizes)
        super().__init__(
            self.square_sizes,
            [self.master_size, *self.weights, n],
            state_size=1 + 3 * (n + 1) + 2 * n,
        )

    def describe(self) -> dict:
        return {
            "name": self.name,
            "instance": self.instance_id,
            "master_size": self.master_size,
            "n": self.n,
            "weights": list(self.weights),
        }

    def placement(self, config: Sequence[int]) -> PlacementResult:
        return greedy_place(config, self.master_size)

    @classmethod
    def from_file(cls, path: str | Path, **kwargs) -> "PerfectSquareProblem":
        master, sizes = read_instance(Path(path).read_text())
        return cls(master, sizes, **kwargs)

    @classmethod
    def instance(cls, instance_id: int, **kwargs) -> "PerfectSquareProblem":
        if instance_id not in INSTANCE_TABLE:
            raise InstanceError(f"unknown perfect-square instance {instance_id}")
        ref = resources.files("adaptive_search.problems") / "data" / f"perfect_square_{instance_id}.txt"
        if not ref.is_file():
            raise InstanceError(
                f"no size list shipped for perfect-square instance {instance_id}; "
                "pass an instance file instead"
            )
        master, sizes = read_instance(ref.read_text())
        expected = INSTANCE_TABLE[instance_id]
        if (master, len(sizes), max(sizes)) != expected:
            raise InstanceError(f"instance {instance_id} data does not match its table entry {expected}")
        return cls(master, sizes, instance_id=instance_id, **kwargs)


def read_instance(text: str) -> tuple[int, list[int]]:
    """Parse ``master\\nsize\\nsize...``; blank lines and ``#`` comments are skipped."""
    values = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values.append(int(line))
        except ValueError:
            raise InstanceError(f"not an integer: {line!r}") from None
    if len(values) < 2:
        raise InstanceError("instance needs a master size and at least one square")
    return values[0], values[1:]
