import os
import sys

import pytest

# subprocess tests run the CLI with this interpreter
PYTHON = sys.executable


@pytest.fixture
def clean_env(monkeypatch):
    monkeypatch.delenv("FUJITA_LAB_THREADS", raising=False)
    return os.environ


# One summary line per acceptance criterion, printed after the run so it
# shows up in plain (captured) pytest output.
_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def acceptance():
    def record(number: int, passed: bool, detail: str):
        _ACCEPTANCE[number] = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[k])
