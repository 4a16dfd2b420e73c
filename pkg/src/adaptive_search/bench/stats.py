"""Timing statistics for repeated runs.

The central figure is the trimmed mean: one lowest and one highest sample
are dropped before averaging.  The standard deviation, by contrast, is taken
over every sample.  Speedups are ratios against the one-worker row.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Mapping, Sequence


class TooFewSamples(ValueError):
    pass


class MissingBaseline(KeyError):
    pass


def trimmed_mean(samples: Sequence[float]) -> float:
    """Mean after removing exactly one minimum and one maximum sample."""
    if len(samples) < 3:
        raise TooFewSamples(f"trimmed mean needs at least 3 samples, got {len(samples)}")
    kept = sorted(samples)[1:-1]
    return statistics.mean(kept)


@dataclass(frozen=True)
class StatsSummary:
    samples: tuple[float, ...]
    trimmed_mean: float
    worst: float
    best: float
    stddev: float

    @property
    def runs(self) -> int:
        return len(self.samples)


def summarize(samples: Sequence[float]) -> StatsSummary:
    samples = tuple(float(s) for s in samples)
    tm = trimmed_mean(samples)
    # statistics.stdev is exact for equal samples (returns 0.0)
    sd = statistics.stdev(samples)
    return StatsSummary(samples, tm, max(samples), min(samples), sd)


@dataclass(frozen=True)
class SpeedupRow:
    workers: int
    summary: StatsSummary
    speedup: float
    worst_case_speedup: float


def _ratio(a: float, b: float) -> float:
    if b == 0:
        return float("inf") if a > 0 else 1.0
    return a / b


def speedup_table(summaries: Mapping[int, StatsSummary]) -> list[SpeedupRow]:
    """Rows sorted by worker count; speedups relative to the 1-worker row."""
    if 1 not in summaries:
        raise MissingBaseline("speedups need a 1-worker baseline")
    base = summaries[1]
    rows = []
    for k in sorted(summaries):
        s = summaries[k]
        rows.append(SpeedupRow(
            workers=k,
            summary=s,
            speedup=_ratio(base.trimmed_mean, s.trimmed_mean),
            worst_case_speedup=_ratio(base.worst, s.worst),
        ))
    return rows
