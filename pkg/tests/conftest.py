"""Shared fixtures and the acceptance-summary reporter.

Acceptance tests record one PASS/FAIL line each through the ``acceptance``
fixture; the lines are echoed in the terminal summary so a plain
``pytest -v`` run ends with the per-criterion verdict block.
"""

from __future__ import annotations

import pytest

ACCEPTANCE_LINES: list[str] = []


class AcceptanceRecorder:
    def check(self, criterion: int, name: str, ok: bool, detail: str) -> None:
        line = f"[PRIMARY {criterion}] {'PASS' if ok else 'FAIL'} {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        assert ok, line


@pytest.fixture(scope="session")
def acceptance() -> AcceptanceRecorder:
    return AcceptanceRecorder()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
