"""Command line: ``solve`` for a single run, ``bench`` for a timed sweep.

Exit codes: 0 when every run completed (solved or not), 2 for an invalid
specification, 3 when a problem instance cannot be loaded.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from adaptive_search.bench.params import load_params_file, load_profile
from adaptive_search.bench.suite import CSV_HEADER, BenchmarkSpec, InvalidSpec, build_params, run_suite
from adaptive_search.engine import InvalidParams, warm_up
from adaptive_search.parallel import ParallelConfig, StartMode, solve_parallel
from adaptive_search.problems import InstanceError, canonical_name, make_problem, validate

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INSTANCE = 3

log = logging.getLogger("adaptive_search")


def _worker_list(text: str) -> list[int]:
    try:
        counts = [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not counts:
        raise argparse.ArgumentTypeError("no worker counts given")
    return counts


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--problem", required=True,
                   help="all-interval, partition, magic-square or perfect-square")
    p.add_argument("--size", type=int, help="n (all-interval, partition) or side (magic-square)")
    p.add_argument("--instance", help="perfect-square instance id (1-5) or instance file")
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--timeout", type=float, help="wall-clock limit per run, seconds")
    p.add_argument("--params", type=Path, help="key=value parameter file, applied over the profile")
    p.add_argument("--no-profile", action="store_true",
                   help="ignore the packaged per-problem profile; use generic defaults")
    p.add_argument("--start-mode", choices=[m.value for m in StartMode], default="random")
    p.add_argument("--out", type=Path, help="directory for reports")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adaptive-search", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run one (possibly parallel) search and print the result")
    _add_common(solve)
    solve.add_argument("--workers", type=int, default=1)
    solve.add_argument("--json", action="store_true", help="print the result as JSON")

    bench = sub.add_parser("bench", help="repeat runs over worker counts and write JSON/CSV reports")
    _add_common(bench)
    bench.add_argument("--workers", type=_worker_list, default=[1],
                       help="comma-separated worker counts, e.g. 1,2,4,8")
    bench.add_argument("--runs", type=int, default=10)
    bench.add_argument("--name", default="bench", help="report file stem")
    return parser


def _overrides(args) -> tuple[dict, dict]:
    name = canonical_name(args.problem)
    solver, model = ({}, {}) if args.no_profile else load_profile(name)
    if args.params is not None:
        try:
            s, m = load_params_file(args.params)
        except OSError as exc:
            raise InvalidParams(f"cannot read parameter file: {exc}") from None
        solver.update(s)
        model.update(m)
    return solver, model


def _solve(args) -> int:
    solver, options = _overrides(args)
    model = make_problem(args.problem, size=args.size, instance=args.instance, **options)
    params = build_params(model, solver)
    pconfig = ParallelConfig(args.workers, StartMode(args.start_mode), args.seed, args.timeout)
    warm_up(model, params)
    out = solve_parallel(model, params, pconfig)
    valid = out.solved and validate(model, out.config)
    result = {
        "problem": model.describe(),
        "seed": args.seed,
        "workers": args.workers,
        "start_mode": args.start_mode,
        "params": {k: getattr(params, k) for k in params.__dataclass_fields__},
        "status": out.status.value,
        "valid": bool(valid),
        "cost": int(out.cost),
        "winner": out.winner,
        "iterations_total": int(out.iterations_total),
        "restarts": int(out.restarts_used),
        "per_worker": [
            {"worker": r.worker, "status": r.status.value, "cost": int(r.outcome.cost),
             "initial_cost": int(r.outcome.initial_cost),
             "iterations": int(r.iterations_total), "restarts": int(r.restarts_used)}
            for r in out.per_worker
        ],
        "elapsed_ms": out.elapsed * 1000.0,
        "config": [int(v) for v in out.config],
    }
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "solve.json").write_text(json.dumps(result, indent=2))
    if args.json:
        print(json.dumps(result))
    else:
        print(f"status      {result['status']}{'' if valid or not out.solved else ' (FAILED VALIDATION)'}")
        print(f"cost        {result['cost']}")
        print(f"iterations  {result['iterations_total']} (restarts {result['restarts']})")
        if out.winner is not None:
            print(f"winner      worker {out.winner} of {args.workers}")
        print(f"elapsed     {result['elapsed_ms']:.1f} ms")
        print("solution   " if out.solved else "best found ", " ".join(map(str, result["config"])))
    return EXIT_OK


def _bench(args) -> int:
    solver, options = _overrides(args)
    spec = BenchmarkSpec(
        problem=canonical_name(args.problem),
        size=args.size,
        instance=args.instance,
        params=solver,
        model_options=options,
        worker_counts=args.workers,
        runs=args.runs,
        master_seed=args.seed,
        start_mode=StartMode(args.start_mode),
        timeout=args.timeout,
        out_dir=args.out if args.out is not None else Path("bench-out"),
        name=args.name,
    )

    def progress(rec):
        log.info("workers=%d run=%d seed=%d %s %.1f ms cost=%d",
                 rec.workers, rec.run, rec.seed, rec.status, rec.elapsed_ms, rec.cost)

    result = run_suite(spec, progress=progress)
    print(",".join(CSV_HEADER))
    if 1 in result.summaries:
        for row in result.csv_rows():
            print(",".join(f"{v:.4g}" if isinstance(v, float) else str(v) for v in row))
    print(f"reports: {result.json_path} {result.csv_path}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "solve":
            return _solve(args)
        return _bench(args)
    except InstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INSTANCE
    except (InvalidParams, InvalidSpec, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
