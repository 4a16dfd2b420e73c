"""Benchmark harness: statistics, repeated-run suites and the command line."""

from adaptive_search.bench.params import load_params_file, load_profile, parse_params
from adaptive_search.bench.stats import (
    MissingBaseline,
    SpeedupRow,
    StatsSummary,
    TooFewSamples,
    speedup_table,
    summarize,
    trimmed_mean,
)
from adaptive_search.bench.suite import CSV_HEADER, BenchmarkSpec, InvalidSpec, RunRecord, SuiteResult, run_suite

__all__ = [
    "BenchmarkSpec",
    "CSV_HEADER",
    "InvalidSpec",
    "MissingBaseline",
    "RunRecord",
    "SpeedupRow",
    "StatsSummary",
    "SuiteResult",
    "TooFewSamples",
    "load_params_file",
    "load_profile",
    "parse_params",
    "run_suite",
    "speedup_table",
    "summarize",
    "trimmed_mean",
]
