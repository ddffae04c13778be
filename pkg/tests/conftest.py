from __future__ import annotations

import pytest

import paritycode.gf2 as gf2


@pytest.fixture(autouse=True, scope="session")
def _check_gf2_solutions():
    gf2.CHECK_SOLUTIONS = True
    yield
    gf2.CHECK_SOLUTIONS = False


# acceptance verdicts, filled by tests/test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
