"""Plain-text ``key = value`` parameter files.

Keys naming a :class:`SolverParams` field become solver overrides; any other
key is handed to the problem constructor as a model option (for example
``cost = largest-missing`` for all-interval series).  Blank lines and
``#`` comments are ignored.

Each problem ships a tuned profile under ``profiles/``; the CLI layers
generic defaults, then the profile, then a user file.
"""

from __future__ import annotations

import dataclasses
from importlib import resources
from pathlib import Path

from adaptive_search.engine import InvalidParams, SolverParams

SOLVER_KEYS = {f.name: f.type for f in dataclasses.fields(SolverParams)}
_FLOAT_KEYS = {"reset_percentage", "plateau_probability"}
_BOOL_KEYS = {k for k, t in SOLVER_KEYS.items() if t in (bool, "bool")}


def _convert(key: str, raw: str):
    if key in _FLOAT_KEYS:
        return float(raw)
    if key in _BOOL_KEYS:
        if raw.lower() not in ("0", "1", "true", "false", "yes", "no"):
            raise ValueError(raw)
        return raw.lower() in ("1", "true", "yes")
    if key in SOLVER_KEYS:
        return int(raw)
    # model options: ints where they look like ints, strings otherwise
    try:
        return int(raw)
    except ValueError:
        return raw


def parse_params(text: str, source: str = "<params>") -> tuple[dict, dict]:
    """Return ``(solver_overrides, model_options)``."""
    solver, model = {}, {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise InvalidParams(f"{source}:{lineno}: expected key=value, got {line!r}")
        try:
            converted = _convert(key, value)
        except ValueError:
            raise InvalidParams(f"{source}:{lineno}: bad value for {key}: {value!r}") from None
        (solver if key in SOLVER_KEYS else model)[key] = converted
    return solver, model


def load_params_file(path: str | Path) -> tuple[dict, dict]:
    path = Path(path)
    return parse_params(path.read_text(), str(path))


def load_profile(problem: str) -> tuple[dict, dict]:
    """The packaged profile for ``problem``, or empty overrides if none."""
    ref = resources.files("adaptive_search.bench") / "profiles" / f"{problem}.params"
    if not ref.is_file():
        return {}, {}
    return parse_params(ref.read_text(), f"profile {problem}")
