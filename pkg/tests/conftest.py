"""Shared fixtures and the acceptance summary printed at the end of a run."""

import pytest

ACCEPTANCE = {}


@pytest.fixture
def record():
    """Store ``(passed, detail)`` for an acceptance criterion, keyed by number."""

    def _record(number, passed, detail):
        ACCEPTANCE[number] = (bool(passed), detail)
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        tr.write_line(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
