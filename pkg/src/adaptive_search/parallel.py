"""Multi-start parallel Adaptive Search: independent engines, first solution wins.

The controller records T0, launches one thread per engine and waits on a
result queue.  Engines never talk to each other; the only shared object is
a one-byte stop flag that every engine polls once per iteration.  When the
first solution arrives (or the wall-clock limit passes) the controller sets
the flag, joins every thread, and records T1.  ``elapsed`` is T1 - T0.

Engines run compiled code that releases the GIL, so on a multi-core machine
the workers genuinely run side by side.
"""

from __future__ import annotations

import enum
import logging
import queue
import threading
import time
from dataclasses import dataclass, field

import numpy as np

from adaptive_search.engine import (
    AdaptiveSearch,
    InvalidParams,
    Outcome,
    SolverParams,
    Status,
    make_rng,
    random_permutation,
)
from adaptive_search.model import ProblemModel

log = logging.getLogger(__name__)

# spawn keys under the master seed
_WORKER_KEY = 0
_SHARED_KEY = 1


class StartMode(enum.Enum):
    INDEPENDENT_RANDOM = "random"
    SHARED_INITIAL = "shared"


class SpawnFailure(RuntimeError):
    pass


def worker_rng(master_seed: int, worker: int) -> np.random.Generator:
    """Worker ``worker``'s private stream; independent of the worker count."""
    return make_rng(master_seed, _WORKER_KEY, worker)


def shared_initial(model: ProblemModel, master_seed: int) -> np.ndarray:
    return random_permutation(model.base_values, make_rng(master_seed, _SHARED_KEY))


@dataclass(frozen=True)
class ParallelConfig:
    workers: int = 1
    start_mode: StartMode = StartMode.INDEPENDENT_RANDOM
    master_seed: int = 0
    wall_clock_limit: float | None = None

    def __post_init__(self):
        if self.workers < 1:
            raise InvalidParams(f"workers must be >= 1, got {self.workers}")
        if not (0 <= self.master_seed < 2**64):
            raise InvalidParams(f"master_seed must fit in 64 unsigned bits, got {self.master_seed}")
        if self.wall_clock_limit is not None and self.wall_clock_limit < 0:
            raise InvalidParams("wall_clock_limit must be non-negative")
        if not isinstance(self.start_mode, StartMode):
            object.__setattr__(self, "start_mode", StartMode(self.start_mode))


@dataclass
class WorkerReport:
    worker: int
    outcome: Outcome
    finished_at: float  # seconds after T0

    @property
    def status(self) -> Status:
        return self.outcome.status

    @property
    def iterations_total(self) -> int:
        return self.outcome.iterations_total

    @property
    def restarts_used(self) -> int:
        return self.outcome.restarts_used


@dataclass
class ParallelOutcome:
    status: Status
    config: np.ndarray
    cost: int
    winner: int | None
    elapsed: float
    per_worker: list[WorkerReport]
    best_worker: int
    spawn_errors: list[str] = field(default_factory=list)

    @property
    def solved(self) -> bool:
        return self.status is Status.SOLVED

    @property
    def iterations_total(self) -> int:
        """Iterations of the worker whose configuration is reported."""
        return self._reported().iterations_total

    @property
    def restarts_used(self) -> int:
        return self._reported().restarts_used

    @property
    def iterations_all_workers(self) -> int:
        return sum(r.iterations_total for r in self.per_worker)

    def _reported(self) -> WorkerReport:
        for r in self.per_worker:
            if r.worker == self.best_worker:
                return r
        raise LookupError(self.best_worker)


class SearchGroup:
    """A launched set of engines sharing one stop flag."""

    def __init__(self, model: ProblemModel, params: SolverParams, pconfig: ParallelConfig):
        params.validate()
        self.model = model
        self.params = params
        self.pconfig = pconfig
        self.stop = np.zeros(1, np.uint8)
        self.t0 = 0.0
        self.timed_out = False
        self.spawn_errors: list[str] = []
        self._results: queue.Queue = queue.Queue()
        self._lock = threading.Lock()
        self._threads: list[threading.Thread] = []
        self._reports: dict[int, WorkerReport] = {}
        self.winner: int | None = None

    def _work(self, worker: int, engine: AdaptiveSearch, initial) -> None:
        try:
            outcome = engine.run(initial)
        except BaseException as exc:  # reported to the controller, never lost
            with self._lock:
                self._results.put((worker, exc, time.perf_counter() - self.t0))
            return
        with self._lock:
            # timestamp and enqueue together, so queue order is finish order
            self._results.put((worker, outcome, time.perf_counter() - self.t0))

    def launch(self) -> None:
        self.t0 = time.perf_counter()
        pc = self.pconfig
        initial = None
        if pc.start_mode is StartMode.SHARED_INITIAL:
            initial = shared_initial(self.model, pc.master_seed)
        for w in range(pc.workers):
            engine = AdaptiveSearch(self.model, self.params, worker_rng(pc.master_seed, w))
            engine.stop_flag = self.stop
            thread = threading.Thread(
                target=self._work,
                args=(w, engine, None if initial is None else initial.copy()),
                name=f"adaptive-search-worker-{w}",
                daemon=True,
            )
            try:
                thread.start()
            except RuntimeError as exc:
                self.spawn_errors.append(f"worker {w}: {exc}")
                log.warning("could not start worker %d: %s", w, exc)
                continue
            self._threads.append(thread)
        if not self._threads:
            raise SpawnFailure("no worker could be started: " + "; ".join(self.spawn_errors))

    def _collect(self, block_until_done: bool = True) -> None:
        deadline = None
        if self.pconfig.wall_clock_limit is not None:
            deadline = self.t0 + self.pconfig.wall_clock_limit
        errors = []
        while len(self._reports) + len(errors) < len(self._threads):
            timeout = None
            if deadline is not None and not self.stop[0]:
                timeout = max(0.0, deadline - time.perf_counter())
            try:
                worker, result, finished_at = self._results.get(timeout=timeout)
            except queue.Empty:
                self.timed_out = True
                self.stop[0] = 1
                continue
            if isinstance(result, BaseException):
                errors.append((worker, result))
                self.stop[0] = 1
                continue
            self._reports[worker] = WorkerReport(worker, result, finished_at)
            if result.solved and self.winner is None:
                self.winner = worker
                self.stop[0] = 1
        for t in self._threads:
            t.join()
        # a worker that solved before it saw the stop flag solved simultaneously;
        # the lowest id among those wins
        solved = [w for w, r in self._reports.items() if r.outcome.solved]
        if solved:
            self.winner = min(solved)
        if errors:
            worker, exc = errors[0]
            raise RuntimeError(f"worker {worker} failed") from exc

    def stop_broadcast(self) -> list[WorkerReport]:
        """Tell every worker to stop, and return once all have terminated."""
        self.stop[0] = 1
        self._collect()
        return [self._reports[w] for w in sorted(self._reports)]

    def wait(self) -> ParallelOutcome:
        self._collect()
        elapsed = time.perf_counter() - self.t0
        reports = [self._reports[w] for w in sorted(self._reports)]
        if self.winner is not None:
            best = self._reports[self.winner]
            status = Status.SOLVED
        else:
            # anytime: the best of the workers' bests, lowest id on ties
            best = min(reports, key=lambda r: (r.outcome.cost, r.worker))
            interrupted = self.timed_out or any(r.status is Status.INTERRUPTED for r in reports)
            status = Status.INTERRUPTED if interrupted else Status.EXHAUSTED
        return ParallelOutcome(
            status=status,
            config=best.outcome.config.copy(),
            cost=best.outcome.cost,
            winner=self.winner,
            elapsed=elapsed,
            per_worker=reports,
            best_worker=best.worker,
            spawn_errors=list(self.spawn_errors),
        )


def solve_parallel(model: ProblemModel, params: SolverParams, pconfig: ParallelConfig) -> ParallelOutcome:
    group = SearchGroup(model, params, pconfig)
    group.launch()
    return group.wait()
