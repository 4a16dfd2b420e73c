"""Adaptive Search: constraint-based local search for permutation problems."""

from adaptive_search.engine import (
    AdaptiveSearch,
    AllTabu,
    InvalidParams,
    Outcome,
    SearchState,
    SolverParams,
    Status,
    evaluate_moves,
    make_rng,
    partial_reset,
    random_permutation,
    select_culprit,
    solve_sequential,
)
from adaptive_search.model import ProblemModel

__version__ = "0.1.0"

__all__ = [
    "AdaptiveSearch",
    "AllTabu",
    "InvalidParams",
    "Outcome",
    "ProblemModel",
    "SearchState",
    "SolverParams",
    "Status",
    "evaluate_moves",
    "make_rng",
    "partial_reset",
    "random_permutation",
    "select_culprit",
    "solve_sequential",
]
