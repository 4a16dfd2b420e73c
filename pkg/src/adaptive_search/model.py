"""Problem model interface shared by the engine and the concrete benchmarks.

A model is a permutation problem: a configuration assigns the model's base
values to ``n`` variables, one value each.  The heavy lifting (cost, error
projection, swap evaluation) lives in compiled kernels selected by
``kind``; this class gives them a plain Python surface.
"""

from __future__ import annotations

from abc import ABC
from typing import Sequence

import numpy as np

Move = tuple[int, int]


def _kernels():
    # problem modules import this one, and the dispatch imports them
    from adaptive_search import kernels

    return kernels


class ProblemModel(ABC):
    """Base class for permutation problems solved by Adaptive Search.

    Subclasses set ``kind`` (a kernel id from :mod:`adaptive_search.kernels`),
    ``data`` (the int64 parameter vector read by the kernels), ``state_size``
    and ``base_values``.

    ``uniform_role`` marks models where every variable plays the same role,
    so projecting constraint errors on variables carries no information.
    Such models still expose :meth:`variable_errors`; it simply returns the
    summed cost of the constraint terms each variable takes part in.
    """

    name: str = "problem"
    kind: int
    uniform_role: bool = False

    def __init__(self, base_values: Sequence[int], data: Sequence[int], state_size: int):
        self.base_values = np.ascontiguousarray(base_values, dtype=np.int64)
        self.base_values.setflags(write=False)
        self.data = np.ascontiguousarray(data, dtype=np.int64)
        self.data.setflags(write=False)
        self.state_size = int(state_size)

    @property
    def n(self) -> int:
        return int(self.base_values.shape[0])

    def describe(self) -> dict:
        return {"name": self.name, "n": self.n}

    def new_state(self) -> np.ndarray:
        return np.zeros(self.state_size, dtype=np.int64)

    def as_config(self, config: Sequence[int]) -> np.ndarray:
        arr = np.ascontiguousarray(config, dtype=np.int64)
        if arr.shape != (self.n,):
            raise ValueError(f"configuration must have length {self.n}, got {arr.shape}")
        return arr

    def is_permutation(self, config: Sequence[int]) -> bool:
        arr = np.asarray(config, dtype=np.int64)
        return arr.shape == (self.n,) and np.array_equal(np.sort(arr), np.sort(self.base_values))

    def cost(self, config: Sequence[int]) -> int:
        arr = self.as_config(config).copy()
        return int(_kernels().init_cost(self.kind, self.data, arr, self.new_state()))

    def variable_errors(self, config: Sequence[int]) -> np.ndarray:
        arr = self.as_config(config).copy()
        state = self.new_state()
        _kernels().init_cost(self.kind, self.data, arr, state)
        out = np.zeros(self.n, dtype=np.int64)
        _kernels().var_errors(self.kind, self.data, arr, state, out)
        return out

    def candidate_moves(self, config: Sequence[int], culprit: int) -> list[Move]:
        """Swaps worth evaluating for ``culprit``, as ``(culprit, other)`` pairs."""
        arr = self.as_config(config)
        out = np.zeros(self.n, dtype=np.int64)
        m = _kernels().partners(self.kind, self.data, arr, culprit, out)
        return [(culprit, int(j)) for j in out[:m]]

    def swap_cost(self, config: Sequence[int], i: int, j: int) -> int:
        """Cost of ``config`` with positions ``i`` and ``j`` exchanged."""
        arr = self.as_config(config).copy()
        state = self.new_state()
        cost = _kernels().init_cost(self.kind, self.data, arr, state)
        return int(_kernels().swap_cost(self.kind, self.data, arr, state, cost, i, j))

    def apply_move(self, config: np.ndarray, move: Move) -> None:
        i, j = move
        config[i], config[j] = config[j], config[i]
