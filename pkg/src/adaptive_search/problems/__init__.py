"""Benchmark problems: all-interval series, number partitioning, perfect
square placement and magic squares."""

from __future__ import annotations

from pathlib import Path

from adaptive_search.problems.all_interval import AllIntervalProblem
from adaptive_search.problems.magic_square import MagicSquareProblem
from adaptive_search.problems.partition import InvalidInstance, PartitionProblem
from adaptive_search.problems.perfect_square import (
    INSTANCE_TABLE,
    InstanceError,
    PerfectSquareProblem,
    PlacementResult,
    greedy_place,
)
from adaptive_search.problems.validate import validate

PROBLEM_NAMES = ("all-interval", "partition", "magic-square", "perfect-square")

_ALIASES = {
    "all-interval": "all-interval",
    "all_interval": "all-interval",
    "ai": "all-interval",
    "partition": "partition",
    "partit": "partition",
    "magic-square": "magic-square",
    "magic_square": "magic-square",
    "magic": "magic-square",
    "perfect-square": "perfect-square",
    "perfect_square": "perfect-square",
    "square": "perfect-square",
}


def canonical_name(name: str) -> str:
    try:
        return _ALIASES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; choose from {', '.join(PROBLEM_NAMES)}") from None


def make_problem(name: str, size: int | None = None, instance: str | int | None = None, **options):
    """Build a model from CLI-style arguments.

    ``size`` is n for all-interval and partition and the side for magic
    squares.  Perfect squares take ``instance``: a table id (1-5) or the path
    of an instance file.  ``options`` are model options: ``cost`` for
    all-interval series, ``weights`` for perfect squares.
    """
    name = canonical_name(name)
    if isinstance(options.get("weights"), str):
        options["weights"] = tuple(int(w) for w in options["weights"].split(","))
    try:
        return _build(name, size, instance, options)
    except TypeError as exc:
        raise ValueError(f"bad model options for {name}: {exc}") from None


def _build(name, size, instance, options):
    if name == "perfect-square":
        if instance is None:
            instance = 1
        if isinstance(instance, int) or str(instance).isdigit():
            return PerfectSquareProblem.instance(int(instance), **options)
        path = Path(instance)
        if not path.is_file():
            raise InstanceError(f"instance file not found: {path}")
        return PerfectSquareProblem.from_file(path, **options)
    if size is None:
        raise ValueError(f"{name} needs a size")
    if name == "all-interval":
        return AllIntervalProblem(size, **options)
    if options:
        raise ValueError(f"{name} takes no model options, got {sorted(options)}")
    if name == "partition":
        return PartitionProblem(size)
    return MagicSquareProblem(size)


__all__ = [
    "AllIntervalProblem",
    "INSTANCE_TABLE",
    "InstanceError",
    "InvalidInstance",
    "MagicSquareProblem",
    "PROBLEM_NAMES",
    "PartitionProblem",
    "PerfectSquareProblem",
    "PlacementResult",
    "canonical_name",
    "greedy_place",
    "make_problem",
    "validate",
]
