"""Shared fixtures; the acceptance suite's summary lines are printed here."""

from __future__ import annotations

from typing import Dict, Tuple

import pytest

# criterion number -> (passed, detail)
CRITERIA: Dict[int, Tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    def record(number: int, passed: bool, detail: str = "") -> None:
        CRITERIA[number] = (passed, detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        passed, detail = CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
