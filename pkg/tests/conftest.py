"""Shared fixtures: a per-criterion verdict log echoed in the terminal summary."""

import pytest

_VERDICTS: list[str] = []


@pytest.fixture
def verdict(request):
    """Record ``verdict(number, ok, detail)`` as one PASS/FAIL line."""
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        _VERDICTS.append(line)
        if reporter is not None:
            reporter.write_line("")
            reporter.write_line(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
