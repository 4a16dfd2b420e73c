"""Repeated parallel runs over a sweep of worker counts, with reports.

Run ``r`` of every worker count uses master seed ``master_seed + r``, so a
single run can be replayed in isolation with ``solve --seed``.  Worker
counts are swept one group at a time to keep timing samples clean.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

from adaptive_search.bench.stats import StatsSummary, TooFewSamples, speedup_table, summarize
from adaptive_search.engine import InvalidParams, SolverParams, Status, warm_up
from adaptive_search.parallel import ParallelConfig, ParallelOutcome, StartMode, solve_parallel
from adaptive_search.problems import make_problem, validate

log = logging.getLogger(__name__)

CSV_HEADER = [
    "workers", "runs", "solve_rate", "trimmed_mean_ms", "worst_ms",
    "best_ms", "stddev_ms", "speedup", "worst_case_speedup",
]


class InvalidSpec(ValueError):
    pass


@dataclass
class BenchmarkSpec:
    problem: str
    size: int | None = None
    instance: str | int | None = None
    params: dict = field(default_factory=dict)
    model_options: dict = field(default_factory=dict)
    worker_counts: list[int] = field(default_factory=lambda: [1])
    runs: int = 10
    master_seed: int = 0
    start_mode: StartMode = StartMode.INDEPENDENT_RANDOM
    timeout: float | None = None
    out_dir: Path | None = None
    name: str = "bench"

    def validate(self) -> None:
        if self.runs < 3:
            raise InvalidSpec(f"trimmed statistics need runs >= 3, got {self.runs}")
        if not self.worker_counts or any(k < 1 for k in self.worker_counts):
            raise InvalidSpec(f"worker counts must be positive, got {self.worker_counts}")
        if self.timeout is not None and self.timeout <= 0:
            raise InvalidSpec("timeout must be positive")
        if not (0 <= self.master_seed and self.master_seed + self.runs < 2**64):
            raise InvalidSpec("seeds must fit in 64 unsigned bits")

    def echo(self) -> dict:
        d = dataclasses.asdict(self)
        d["start_mode"] = self.start_mode.value
        d["out_dir"] = None if self.out_dir is None else str(self.out_dir)
        return d


@dataclass
class RunRecord:
    run: int
    workers: int
    seed: int
    status: str
    elapsed_ms: float
    cost: int
    winner: int | None
    iterations_total: int
    iterations_all_workers: int
    config: list[int]


@dataclass
class SuiteResult:
    spec: BenchmarkSpec
    records: list[RunRecord]
    summaries: dict[int, StatsSummary]
    solve_rates: dict[int, float]
    json_path: Path | None = None
    csv_path: Path | None = None

    def csv_rows(self) -> list[list]:
        rows = []
        for row in speedup_table(self.summaries):
            s = row.summary
            rows.append([
                row.workers, s.runs, self.solve_rates[row.workers], s.trimmed_mean, s.worst,
                s.best, s.stddev, row.speedup, row.worst_case_speedup,
            ])
        return rows


def build_params(model, overrides: dict) -> SolverParams:
    try:
        return SolverParams.defaults_for(model.n, **overrides)
    except TypeError as exc:
        raise InvalidParams(str(exc)) from None


def record_of(run: int, workers: int, seed: int, out: ParallelOutcome, valid: bool) -> RunRecord:
    status = out.status.value
    if out.status is Status.SOLVED and not valid:
        status = "invalid"
    return RunRecord(
        run=run,
        workers=workers,
        seed=seed,
        status=status,
        elapsed_ms=out.elapsed * 1000.0,
        cost=int(out.cost),
        winner=out.winner,
        iterations_total=int(out.iterations_total),
        iterations_all_workers=int(out.iterations_all_workers),
        config=[int(v) for v in out.config],
    )


def run_suite(spec: BenchmarkSpec, progress=None) -> SuiteResult:
    """Run the whole sweep; write ``<name>.json`` and ``<name>.csv`` if ``out_dir`` is set."""
    spec.validate()
    model = make_problem(spec.problem, size=spec.size, instance=spec.instance, **spec.model_options)
    params = build_params(model, spec.params)
    if spec.out_dir is not None:
        spec.out_dir.mkdir(parents=True, exist_ok=True)
    warm_up(model, params)

    records: list[RunRecord] = []
    summaries: dict[int, StatsSummary] = {}
    solve_rates: dict[int, float] = {}
    for k in spec.worker_counts:
        samples = []
        solved = 0
        for r in range(spec.runs):
            seed = spec.master_seed + r
            pconfig = ParallelConfig(k, spec.start_mode, seed, spec.timeout)
            out = solve_parallel(model, params, pconfig)
            valid = out.solved and validate(model, out.config)
            if out.solved and not valid:
                log.error("run %d (workers=%d) reported a solution that fails validation", r, k)
            solved += valid
            rec = record_of(r, k, seed, out, valid)
            records.append(rec)
            samples.append(rec.elapsed_ms)
            if progress is not None:
                progress(rec)
        summaries[k] = summarize(samples)
        solve_rates[k] = solved / spec.runs

    result = SuiteResult(spec, records, summaries, solve_rates)
    if 1 not in summaries:
        log.warning("no 1-worker row; speedup columns need a baseline and are omitted")
    if spec.out_dir is not None:
        write_reports(result)
    return result


def write_reports(result: SuiteResult) -> None:
    spec = result.spec
    out = spec.out_dir
    json_path = out / f"{spec.name}.json"
    csv_path = out / f"{spec.name}.csv"
    payload = {
        "spec": spec.echo(),
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "runs": [dataclasses.asdict(r) for r in result.records],
    }
    json_path.write_text(json.dumps(payload, indent=2))
    with csv_path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        if 1 in result.summaries:
            w.writerows(result.csv_rows())
        else:
            for k, s in sorted(result.summaries.items()):
                w.writerow([k, s.runs, result.solve_rates[k], s.trimmed_mean, s.worst, s.best, s.stddev, "", ""])
    result.json_path = json_path
    result.csv_path = csv_path


__all__ = [
    "BenchmarkSpec", "CSV_HEADER", "InvalidSpec", "RunRecord", "SuiteResult",
    "TooFewSamples", "build_params", "run_suite", "write_reports",
]
