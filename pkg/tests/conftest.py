import json
from pathlib import Path

import pytest

FIXTURES = Path(__file__).with_name("fixtures")
_ACCEPTANCE = {}


@pytest.fixture(scope="session")
def oracle_rows():
    with open(FIXTURES / "oracle_reference.json") as fh:
        return json.load(fh)


@pytest.fixture
def criterion():
    """Record one acceptance verdict: criterion(number, ok, detail)."""
    def record(number, ok, detail):
        _ACCEPTANCE[number] = (bool(ok), detail)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
