from __future__ import annotations

from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"

_acceptance_lines: list = []


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def acceptance_log():
    """Collects one PASS/FAIL line per acceptance criterion for the run summary."""
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_acceptance_lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
