"""Sequential Adaptive Search over permutation problem models.

Each iteration projects constraint errors on variables, picks the non-Tabu
variable with the highest error (the culprit), and tries every swap the
model offers for it.  The best strictly improving swap is applied;
otherwise the culprit is frozen for ``tabu_tenure`` iterations, and once
more than ``reset_limit`` variables are frozen a random fraction of the
configuration is re-shuffled.  After ``max_iterations`` iterations without
a solution the search restarts from a fresh random permutation, at most
``max_restarts`` times.

The loop is compiled with numba and releases the GIL, so independent
searches can run on separate threads.  It polls a one-byte stop flag once
per iteration; setting it makes the search return its best configuration
so far.
"""

from __future__ import annotations

import enum
import math
import threading
import time
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from adaptive_search import kernels
from adaptive_search.model import ProblemModel

SOLVED = 0
EXHAUSTED = 1
INTERRUPTED = 2

EV_MOVE = 0
EV_TABU = 1
EV_RESET = 2

_MAX_COST = np.iinfo(np.int64).max


class Status(enum.Enum):
    SOLVED = "solved"
    EXHAUSTED = "exhausted"
    INTERRUPTED = "interrupted"


_STATUS_CODES = {SOLVED: Status.SOLVED, EXHAUSTED: Status.EXHAUSTED, INTERRUPTED: Status.INTERRUPTED}


class InvalidParams(ValueError):
    pass


class AllTabu(RuntimeError):
    """Every variable is frozen; no culprit can be chosen."""


@dataclass(frozen=True)
class SolverParams:
    tabu_tenure: int = 10
    reset_limit: int = 2
    reset_percentage: float = 0.1
    max_iterations: int = 1000
    max_restarts: int = 10
    rng_seed: int = 0
    plateau_probability: float = 0.0
    exhaustive: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not (0.0 < self.reset_percentage <= 1.0):
            raise InvalidParams(f"reset_percentage must be in (0, 1], got {self.reset_percentage}")
        if self.tabu_tenure < 1:
            raise InvalidParams(f"tabu_tenure must be >= 1, got {self.tabu_tenure}")
        if self.max_iterations < 1:
            raise InvalidParams(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.max_restarts < 0:
            raise InvalidParams(f"max_restarts must be >= 0, got {self.max_restarts}")
        if self.reset_limit < 1:
            raise InvalidParams(f"reset_limit must be >= 1, got {self.reset_limit}")
        if not (0.0 <= self.plateau_probability <= 1.0):
            raise InvalidParams(f"plateau_probability must be in [0, 1], got {self.plateau_probability}")
        if not (0 <= self.rng_seed < 2**64):
            raise InvalidParams(f"rng_seed must fit in 64 unsigned bits, got {self.rng_seed}")

    @classmethod
    def defaults_for(cls, n: int, **overrides) -> "SolverParams":
        """Generic defaults for an ``n``-variable problem."""
        values = dict(
            tabu_tenure=10,
            reset_limit=max(2, n // 10),
            reset_percentage=0.1,
            max_iterations=100 * n,
            max_restarts=10,
        )
        values.update(overrides)
        return cls(**values)

    def reset_count(self, n: int) -> int:
        return reset_count(self.reset_percentage, n)


def reset_count(reset_percentage: float, n: int) -> int:
    """Number of positions a partial reset re-shuffles (half-up rounding, at least 1)."""
    return max(1, min(n, math.floor(reset_percentage * n + 0.5)))


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """PCG64 stream for ``seed``, split by ``key``.

    ``make_rng(s, i)`` is the ``i``-th child of ``SeedSequence(s)``, so a
    worker's stream does not depend on how many siblings exist.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


@dataclass
class SearchState:
    iteration: int
    restart: int
    tabu_until: np.ndarray
    best_config: np.ndarray
    best_cost: int

    @property
    def tabu_count(self) -> int:
        return int(np.count_nonzero(self.tabu_until > self.iteration))

    def is_tabu(self, i: int) -> bool:
        return bool(self.tabu_until[i] > self.iteration)

    @classmethod
    def fresh(cls, config: np.ndarray, cost: int) -> "SearchState":
        return cls(0, 0, np.zeros(config.shape[0], dtype=np.int64), config.copy(), int(cost))


@dataclass
class Outcome:
    status: Status
    config: np.ndarray
    cost: int
    iterations_total: int
    restarts_used: int
    initial_cost: int
    elapsed: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def solved(self) -> bool:
        return self.status is Status.SOLVED

    def same_search(self, other: "Outcome") -> bool:
        """Equal results, ignoring wall-clock time."""
        return (
            self.status is other.status
            and self.cost == other.cost
            and self.iterations_total == other.iterations_total
            and self.restarts_used == other.restarts_used
            and self.initial_cost == other.initial_cost
            and np.array_equal(self.config, other.config)
        )


# --- compiled building blocks -------------------------------------------------


@njit(cache=True)
def _randint(rng, high):
    return rng.integers(0, high)


@njit(cache=True)
def _random_permutation(base, out, rng):
    out[:] = base
    rng.shuffle(out)


@njit(cache=True)
def _select_culprit(errors, tabu_until, iteration, rng, buf):
    count = 0
    best = 0
    for i in range(errors.shape[0]):
        if tabu_until[i] > iteration:
            continue
        e = errors[i]
        if count == 0 or e > best:
            best = e
            buf[0] = i
            count = 1
        elif e == best:
            buf[count] = i
            count += 1
    if count == 0:
        return -1
    if count == 1:
        return buf[0]
    return buf[_randint(rng, count)]


@njit(cache=True)
def _best_move(kind, data, config, state, cost, culprit, cand, m, rng, buf):
    best = _MAX_COST
    count = 0
    for t in range(m):
        j = cand[t]
        c = kernels.swap_cost(kind, data, config, state, cost, culprit, j)
        if c < best:
            best = c
            buf[0] = j
            count = 1
        elif c == best:
            buf[count] = j
            count += 1
    if count == 0 or best >= cost:
        return -1, best, count
    if count == 1:
        return buf[0], best, count
    return buf[_randint(rng, count)], best, count


@njit(cache=True)
def _partial_reset(config, k, tabu_until, rng, idx, vals):
    n = config.shape[0]
    for t in range(n):
        idx[t] = t
    # partial Fisher-Yates: idx[:k] becomes a uniform k-subset
    for t in range(k):
        r = t + _randint(rng, n - t)
        tmp = idx[t]
        idx[t] = idx[r]
        idx[r] = tmp
    for t in range(k):
        vals[t] = config[idx[t]]
    for t in range(k - 1, 0, -1):
        r = _randint(rng, t + 1)
        tmp = vals[t]
        vals[t] = vals[r]
        vals[r] = tmp
    for t in range(k):
        config[idx[t]] = vals[t]
        tabu_until[idx[t]] = 0


@njit(cache=True)
def _reset(kind, data, config, state, tabu_until, reset_k, rng, ibuf, vbuf):
    _partial_reset(config, reset_k, tabu_until, rng, ibuf, vbuf)
    # zeroing the Tabu count lifts every remaining mark too
    tabu_until[:] = 0
    return kernels.init_cost(kind, data, config, state)


@njit(cache=True)
def _step(kind, data, config, state, cost, errors, tabu_until, iteration, rng,
          tenure, reset_limit, reset_k, plateau_p, ibuf, vbuf, cand):
    kernels.var_errors(kind, data, config, state, errors)
    culprit = _select_culprit(errors, tabu_until, iteration, rng, ibuf)
    if culprit < 0:
        cost = _reset(kind, data, config, state, tabu_until, reset_k, rng, ibuf, vbuf)
        return cost, EV_RESET, -1, -1
    m = kernels.partners(kind, data, config, culprit, cand)
    j, best, count = _best_move(kind, data, config, state, cost, culprit, cand, m, rng, ibuf)
    if j < 0 and plateau_p > 0.0 and count > 0 and best == cost and rng.random() < plateau_p:
        j = ibuf[_randint(rng, count)]
    if j < 0:
        tabu_until[culprit] = iteration + tenure
        live = 0
        for i in range(tabu_until.shape[0]):
            if tabu_until[i] > iteration:
                live += 1
        if live > reset_limit:
            cost = _reset(kind, data, config, state, tabu_until, reset_k, rng, ibuf, vbuf)
            return cost, EV_RESET, culprit, -1
        return cost, EV_TABU, culprit, -1
    cost = kernels.apply_swap(kind, data, config, state, cost, culprit, j)
    return cost, EV_MOVE, culprit, j


@njit(cache=True)
def _step_pairs(kind, data, config, state, cost, tabu_until, iteration, rng,
                tenure, reset_limit, reset_k, plateau_p, ibuf, vbuf, cand, pi, pj):
    # every non-Tabu candidate pair is scanned; Tabu marks fall on both variables
    n = config.shape[0]
    best = _MAX_COST
    count = 0
    for i in range(n):
        if tabu_until[i] > iteration:
            continue
        m = kernels.partners(kind, data, config, i, cand)
        for t in range(m):
            j = cand[t]
            if j <= i or tabu_until[j] > iteration:
                continue
            c = kernels.swap_cost(kind, data, config, state, cost, i, j)
            if c < best:
                best = c
                count = 0
            if c == best:
                pi[count] = i
                pj[count] = j
                count += 1
    if count == 0:
        cost = _reset(kind, data, config, state, tabu_until, reset_k, rng, ibuf, vbuf)
        return cost, EV_RESET, -1, -1
    pick = 0 if count == 1 else _randint(rng, count)
    bi = pi[pick]
    bj = pj[pick]
    if best < cost or (plateau_p > 0.0 and best == cost and rng.random() < plateau_p):
        cost = kernels.apply_swap(kind, data, config, state, cost, bi, bj)
        return cost, EV_MOVE, bi, bj
    tabu_until[bi] = iteration + tenure
    tabu_until[bj] = iteration + tenure
    live = 0
    for i in range(n):
        if tabu_until[i] > iteration:
            live += 1
    if live > reset_limit:
        cost = _reset(kind, data, config, state, tabu_until, reset_k, rng, ibuf, vbuf)
        return cost, EV_RESET, bi, bj
    return cost, EV_TABU, bi, bj


def _pair_buffers(n: int, exhaustive: bool):
    size = max(1, n * (n - 1) // 2) if exhaustive else 1
    return np.zeros(size, np.int64), np.zeros(size, np.int64)


@njit(cache=True, nogil=True)
def _run(kind, data, base, config, state, tabu_until, best_config, rng,
         tenure, reset_limit, reset_k, plateau_p, exhaustive, max_iter, max_restarts, draw_initial, stop, out):
    n = config.shape[0]
    errors = np.zeros(n, np.int64)
    ibuf = np.zeros(n, np.int64)
    vbuf = np.zeros(n, np.int64)
    cand = np.zeros(n, np.int64)
    npairs = max(1, n * (n - 1) // 2) if exhaustive else 1
    pi = np.zeros(npairs, np.int64)
    pj = np.zeros(npairs, np.int64)
    if draw_initial:
        _random_permutation(base, config, rng)
    cost = kernels.init_cost(kind, data, config, state)
    initial_cost = cost
    best_cost = cost
    best_config[:] = config
    total = 0
    restart = 0
    iteration = 0
    restart_best = cost
    status = EXHAUSTED
    while True:
        tabu_until[:] = 0
        iteration = 0
        restart_best = cost
        while cost > 0 and iteration < max_iter:
            if stop[0] != 0:
                status = INTERRUPTED
                break
            iteration += 1
            total += 1
            if exhaustive:
                cost, ev, a, b = _step_pairs(kind, data, config, state, cost, tabu_until, iteration,
                                             rng, tenure, reset_limit, reset_k, plateau_p, ibuf, vbuf, cand, pi, pj)
            else:
                cost, ev, a, b = _step(kind, data, config, state, cost, errors, tabu_until, iteration,
                                       rng, tenure, reset_limit, reset_k, plateau_p, ibuf, vbuf, cand)
            if cost < restart_best:
                restart_best = cost
            if cost < best_cost:
                best_cost = cost
                best_config[:] = config
        if status == INTERRUPTED:
            break
        if cost == 0:
            status = SOLVED
            break
        if restart >= max_restarts:
            break
        if stop[0] != 0:
            status = INTERRUPTED
            break
        restart += 1
        _random_permutation(base, config, rng)
        cost = kernels.init_cost(kind, data, config, state)
        if cost < best_cost:
            best_cost = cost
            best_config[:] = config
    out[0] = status
    out[1] = best_cost
    out[2] = total
    out[3] = restart
    out[4] = initial_cost
    out[5] = iteration
    out[6] = restart_best


# --- Python surface -----------------------------------------------------------


def random_permutation(base_values, rng: np.random.Generator) -> np.ndarray:
    """Uniform random permutation of ``base_values`` (an int or a sequence).

    An int ``n`` stands for ``0..n-1``.
    """
    base = np.arange(base_values) if np.isscalar(base_values) else base_values
    base = np.ascontiguousarray(base, dtype=np.int64)
    if base.shape[0] < 1:
        raise ValueError("need at least one value")
    out = np.empty_like(base)
    _random_permutation(base, out, rng)
    return out


def select_culprit(errors, state: SearchState, rng: np.random.Generator) -> int:
    """Index of a non-Tabu variable with maximal error; ties broken at random."""
    errors = np.ascontiguousarray(errors, dtype=np.int64)
    buf = np.zeros(errors.shape[0], np.int64)
    i = _select_culprit(errors, state.tabu_until, state.iteration, rng, buf)
    if i < 0:
        raise AllTabu("every variable is Tabu")
    return int(i)


def evaluate_moves(model: ProblemModel, config, culprit: int, rng: np.random.Generator):
    """Best swap for ``culprit`` as ``((culprit, j), new_cost)``.

    Returns ``None`` when no candidate strictly lowers the cost.
    """
    arr = model.as_config(config).copy()
    state = model.new_state()
    cost = kernels.init_cost(model.kind, model.data, arr, state)
    cand = np.zeros(model.n, np.int64)
    m = kernels.partners(model.kind, model.data, arr, culprit, cand)
    j, best, _ = _best_move(model.kind, model.data, arr, state, cost, culprit, cand, m, rng,
                            np.zeros(model.n, np.int64))
    if j < 0:
        return None
    return (int(culprit), int(j)), int(best)


def partial_reset(config, reset_percentage: float, state: SearchState, rng: np.random.Generator) -> np.ndarray:
    """Shuffle the values held by a random subset of positions, in place.

    The subset has ``reset_count(reset_percentage, n)`` positions; their Tabu
    marks are lifted.  Returns ``config``.
    """
    if not (0.0 < reset_percentage <= 1.0):
        raise InvalidParams(f"reset_percentage must be in (0, 1], got {reset_percentage}")
    n = config.shape[0]
    k = reset_count(reset_percentage, n)
    _partial_reset(config, k, state.tabu_until, rng, np.zeros(n, np.int64), np.zeros(n, np.int64))
    return config


class AdaptiveSearch:
    """One search engine: a model, its parameters, and a private generator.

    :meth:`run` executes the whole compiled loop.  :meth:`start` and
    :meth:`step` expose single iterations for inspection; driving them
    through :meth:`iterate` follows exactly the trajectory of :meth:`run`.
    """

    def __init__(self, model: ProblemModel, params: SolverParams, rng: np.random.Generator | None = None):
        params.validate()
        self.model = model
        self.params = params
        self.rng = rng if rng is not None else make_rng(params.rng_seed)
        n = model.n
        self.config = model.base_values.copy()
        self.kstate = model.new_state()
        self.cost = 0
        self.state = SearchState.fresh(self.config, 0)
        self._errors = np.zeros(n, np.int64)
        self._ibuf = np.zeros(n, np.int64)
        self._vbuf = np.zeros(n, np.int64)
        self._cand = np.zeros(n, np.int64)
        self.reset_k = params.reset_count(n)
        self._pi, self._pj = _pair_buffers(n, params.exhaustive)
        self.stop_flag = np.zeros(1, np.uint8)

    def request_stop(self) -> None:
        self.stop_flag[0] = 1

    def start(self, initial=None) -> None:
        """Begin a restart from ``initial`` (or a fresh random permutation)."""
        if initial is None:
            _random_permutation(self.model.base_values, self.config, self.rng)
        else:
            self.config[:] = self.model.as_config(initial)
        self.cost = int(kernels.init_cost(self.model.kind, self.model.data, self.config, self.kstate))
        self.state.iteration = 0
        self.state.tabu_until[:] = 0
        if self.state.restart == 0 or self.cost < self.state.best_cost:
            self.state.best_config[:] = self.config
            self.state.best_cost = self.cost

    def step(self) -> tuple[int, int, int]:
        """Run one iteration; returns ``(event, culprit, partner)``."""
        p = self.params
        self.state.iteration += 1
        m = self.model
        if p.exhaustive:
            cost, ev, a, b = _step_pairs(
                m.kind, m.data, self.config, self.kstate, self.cost, self.state.tabu_until,
                self.state.iteration, self.rng, p.tabu_tenure, p.reset_limit, self.reset_k,
                p.plateau_probability, self._ibuf, self._vbuf, self._cand, self._pi, self._pj,
            )
        else:
            cost, ev, a, b = _step(
                m.kind, m.data, self.config, self.kstate, self.cost, self._errors,
                self.state.tabu_until, self.state.iteration, self.rng, p.tabu_tenure, p.reset_limit,
                self.reset_k, p.plateau_probability, self._ibuf, self._vbuf, self._cand,
            )
        self.cost = int(cost)
        if self.cost < self.state.best_cost:
            self.state.best_cost = self.cost
            self.state.best_config[:] = self.config
        return int(ev), int(a), int(b)

    def iterate(self, initial=None):
        """Generator over ``(restart, iteration, event, culprit, partner)``.

        Mirrors the compiled loop in :meth:`run`, including restarts; the
        final ``self.state`` and ``self.config`` match what :meth:`run`
        would have produced from the same generator state.
        """
        p = self.params
        self.state.restart = 0
        self.start(initial)
        while True:
            while self.cost > 0 and self.state.iteration < p.max_iterations:
                ev, a, b = self.step()
                yield self.state.restart, self.state.iteration, ev, a, b
            if self.cost == 0 or self.state.restart >= p.max_restarts:
                return
            self.state.restart += 1
            self.start()

    def run(self, initial=None) -> Outcome:
        p = self.params
        model = self.model
        if initial is not None:
            self.config[:] = model.as_config(initial)
        best = np.zeros(model.n, np.int64)
        out = np.zeros(7, np.int64)
        _run(
            model.kind, model.data, model.base_values, self.config, self.kstate, self.state.tabu_until,
            best, self.rng, p.tabu_tenure, p.reset_limit, self.reset_k, p.plateau_probability,
            p.exhaustive, p.max_iterations,
            p.max_restarts, initial is None, self.stop_flag, out,
        )
        self.state.best_config = best
        self.state.best_cost = int(out[1])
        self.state.restart = int(out[3])
        self.state.iteration = int(out[5])
        self.cost = int(kernels.init_cost(model.kind, model.data, self.config, self.kstate))
        return Outcome(
            status=_STATUS_CODES[int(out[0])],
            config=best,
            cost=int(out[1]),
            iterations_total=int(out[2]),
            restarts_used=int(out[3]),
            initial_cost=int(out[4]),
            extra={"last_restart_best_cost": int(out[6])},
        )


def solve_sequential(
    model: ProblemModel,
    params: SolverParams,
    rng: np.random.Generator | None = None,
    budget: float | None = None,
    initial=None,
) -> Outcome:
    """Run Adaptive Search to a solution, exhaustion, or the ``budget`` (seconds).

    ``rng`` defaults to a generator seeded from ``params.rng_seed``.
    """
    engine = AdaptiveSearch(model, params, rng)
    timer = None
    if budget is not None:
        timer = threading.Timer(max(0.0, budget), engine.request_stop)
        timer.daemon = True
    t0 = time.perf_counter()
    if timer is not None:
        timer.start()
    try:
        outcome = engine.run(initial)
    finally:
        if timer is not None:
            timer.cancel()
    outcome.elapsed = time.perf_counter() - t0
    return outcome


def warm_up(model: ProblemModel, params: SolverParams | None = None) -> None:
    """Load (or compile) the kernels for ``model`` so timed runs exclude it."""
    base = params if params is not None else SolverParams()
    tiny = SolverParams(
        tabu_tenure=base.tabu_tenure,
        reset_limit=base.reset_limit,
        reset_percentage=base.reset_percentage,
        max_iterations=1,
        max_restarts=0,
        plateau_probability=base.plateau_probability,
        exhaustive=base.exhaustive,
    )
    AdaptiveSearch(model, tiny, make_rng(0)).run()
