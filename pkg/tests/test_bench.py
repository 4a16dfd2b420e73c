"""Statistics, parameter files, benchmark suite and command line."""

import csv
import json
import math

import pytest

from adaptive_search.bench import (
    CSV_HEADER,
    BenchmarkSpec,
    InvalidSpec,
    MissingBaseline,
    TooFewSamples,
    parse_params,
    run_suite,
    speedup_table,
    summarize,
    trimmed_mean,
)
from adaptive_search.bench.cli import main
from adaptive_search.bench.params import load_profile
from adaptive_search.bench.suite import build_params
from adaptive_search.engine import InvalidParams
from adaptive_search.problems import make_problem, validate

# --- statistics ----------------------------------------------------------------


def test_trimmed_mean_examples():
    assert trimmed_mean([5, 1, 9]) == 5
    assert trimmed_mean([4, 4, 4, 4]) == 4
    assert trimmed_mean([1, 2, 3, 4, 100]) == 3


def test_trimmed_mean_drops_one_copy_of_each_extreme():
    assert trimmed_mean([1, 1, 5, 9, 9]) == 5


def test_trimmed_mean_needs_three():
    with pytest.raises(TooFewSamples):
        trimmed_mean([1.0, 2.0])


def test_summary_fields():
    s = summarize([2, 4, 4, 4, 5, 5, 7, 9])
    assert (s.best, s.worst, s.runs) == (2, 9, 8)
    assert s.trimmed_mean == pytest.approx(29 / 6)
    # sample standard deviation over all eight samples
    assert s.stddev == pytest.approx(math.sqrt(32 / 7))
    assert summarize([3, 3, 3]).stddev == 0.0


def test_speedup_example():
    base = summarize([891.2, 891.2, 891.2])
    par = summarize([40.0, 40.0, 40.0])
    rows = speedup_table({8: par, 1: base})
    assert [r.workers for r in rows] == [1, 8]
    assert rows[0].speedup == 1.0
    assert rows[1].speedup == pytest.approx(22.28)
    assert rows[1].worst_case_speedup == pytest.approx(22.28)


def test_worst_case_speedup_is_ratio_of_maxima():
    rows = speedup_table({1: summarize([10, 20, 100]), 4: summarize([5, 6, 25])})
    assert rows[1].speedup == pytest.approx(20 / 6)
    assert rows[1].worst_case_speedup == pytest.approx(4.0)


def test_speedup_needs_baseline():
    with pytest.raises(MissingBaseline):
        speedup_table({2: summarize([1, 2, 3])})


# --- parameter files -------------------------------------------------------------


def test_parse_params():
    solver, model = parse_params(
        "# comment\n\ntabu_tenure = 4\nreset_percentage=0.2  # trailing\nexhaustive = 1\ncost = largest-missing\n"
    )
    assert solver == {"tabu_tenure": 4, "reset_percentage": 0.2, "exhaustive": True}
    assert model == {"cost": "largest-missing"}


@pytest.mark.parametrize("text", ["tabu_tenure 4", "tabu_tenure = x", "= 3", "exhaustive = maybe"])
def test_parse_params_rejects(text):
    with pytest.raises(InvalidParams):
        parse_params(text)


def test_profiles_exist_and_build():
    for name, kw in (("all-interval", {"size": 20}), ("partition", {"size": 64}),
                     ("magic-square", {"size": 6}), ("perfect-square", {})):
        solver, options = load_profile(name)
        assert solver, name
        model = make_problem(name, **kw, **options)
        build_params(model, solver).validate()
    assert load_profile("no-such-problem") == ({}, {})


# --- suite ---------------------------------------------------------------------


def test_spec_validation():
    with pytest.raises(InvalidSpec):
        BenchmarkSpec("partition", size=8, runs=2).validate()
    with pytest.raises(InvalidSpec):
        BenchmarkSpec("partition", size=8, worker_counts=[1, 0]).validate()
    with pytest.raises(InvalidSpec):
        BenchmarkSpec("partition", size=8, timeout=0).validate()


def test_run_suite_reports(tmp_path):
    spec = BenchmarkSpec("magic-square", size=4, worker_counts=[1, 2], runs=4, master_seed=3,
                         params={"max_restarts": 1000}, out_dir=tmp_path, name="tiny")
    result = run_suite(spec)
    assert len(result.records) == 8
    model = make_problem("magic-square", size=4)
    for rec in result.records:
        assert rec.status == "solved" and validate(model, rec.config)
        assert rec.seed == 3 + rec.run
    with open(tmp_path / "tiny.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == CSV_HEADER
    assert [int(r[0]) for r in rows[1:]] == [1, 2]
    assert float(rows[1][7]) == 1.0
    payload = json.loads((tmp_path / "tiny.json").read_text())
    assert payload["spec"]["problem"] == "magic-square"
    assert payload["spec"]["worker_counts"] == [1, 2]
    first = payload["runs"][0]
    for key in ("run", "workers", "seed", "status", "elapsed_ms", "cost", "winner", "iterations_total"):
        assert key in first


def test_run_suite_reproducible_iterations():
    spec = BenchmarkSpec("all-interval", size=12, worker_counts=[1, 3], runs=3, master_seed=9,
                         params={"max_restarts": 1000})
    a = run_suite(spec)
    b = run_suite(spec)
    assert [r.iterations_total for r in a.records] == [r.iterations_total for r in b.records]
    assert [r.config for r in a.records] == [r.config for r in b.records]


def test_timeout_bounded_runs_report_pseudo_solutions():
    spec = BenchmarkSpec("all-interval", size=300, runs=3, timeout=0.2,
                         params={"max_iterations": 10**9, "max_restarts": 0})
    result = run_suite(spec)
    assert result.solve_rates[1] < 1
    model = make_problem("all-interval", size=300)
    for rec in result.records:
        assert rec.status == "interrupted"
        assert rec.cost == model.cost(rec.config) > 0


# --- command line ----------------------------------------------------------------


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_solve_json(capsys):
    code, out, _ = run_cli(capsys, "solve", "--problem", "partition", "--size", "16", "--seed", "4", "--json")
    assert code == 0
    res = json.loads(out)
    assert res["status"] == "solved" and res["valid"]
    assert validate(make_problem("partition", size=16), res["config"])


def test_cli_solve_text_and_out(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "solve", "--problem", "magic-square", "--size", "3", "--out", str(tmp_path))
    assert code == 0 and "status      solved" in out
    assert json.loads((tmp_path / "solve.json").read_text())["valid"]


def test_cli_deterministic(capsys):
    argv = ["solve", "--problem", "all-interval", "--size", "16", "--seed", "11", "--json"]
    a = json.loads(run_cli(capsys, *argv)[1])
    b = json.loads(run_cli(capsys, *argv)[1])
    for key in ("iterations_total", "restarts", "config", "cost"):
        assert a[key] == b[key]


def test_cli_params_file(capsys, tmp_path):
    p = tmp_path / "p.params"
    p.write_text("max_iterations = 2\nmax_restarts = 0\n")
    code, out, _ = run_cli(capsys, "solve", "--problem", "all-interval", "--size", "200", "--params", str(p), "--json")
    res = json.loads(out)
    assert code == 0 and res["status"] == "exhausted" and res["iterations_total"] == 2
    assert res["params"]["exhaustive"] is True  # profile still applies under the file


def test_cli_bench(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "bench", "--problem", "partition", "--size", "16", "--workers", "1,2",
                           "--runs", "3", "--out", str(tmp_path), "--name", "b")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert [ln.split(",")[0] for ln in lines[1:3]] == ["1", "2"]
    assert (tmp_path / "b.csv").exists() and (tmp_path / "b.json").exists()


@pytest.mark.parametrize("argv", [
    ["bench", "--problem", "partition", "--size", "16", "--runs", "2"],
    ["solve", "--problem", "partition", "--size", "10"],
    ["solve", "--problem", "sudoku", "--size", "9"],
    ["solve", "--problem", "partition", "--size", "16", "--workers", "0"],
])
def test_cli_invalid_spec_exit_2(capsys, argv, tmp_path):
    code, _, err = run_cli(capsys, *argv, "--out", str(tmp_path))
    assert code == 2 and err.startswith("error:")


def test_cli_bad_params_file_exit_2(capsys, tmp_path):
    code, _, _ = run_cli(capsys, "solve", "--problem", "partition", "--size", "16",
                         "--params", str(tmp_path / "missing.params"))
    assert code == 2


def test_cli_instance_failure_exit_3(capsys, tmp_path):
    code, _, err = run_cli(capsys, "solve", "--problem", "perfect-square", "--instance", "3")
    assert code == 3 and "error" in err
    code, _, _ = run_cli(capsys, "solve", "--problem", "perfect-square", "--instance", str(tmp_path / "nope.txt"))
    assert code == 3
