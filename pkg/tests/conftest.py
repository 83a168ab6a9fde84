import re

import pytest

_ACCEPTANCE: list = []


@pytest.fixture
def record():
    """Record one acceptance line: record(number, title, ok, detail)."""

    def _record(number, title, ok, detail=""):
        _ACCEPTANCE.append((number, title, bool(ok), detail))
        return ok

    return _record


def _order(row):
    m = re.match(r"\d+", str(row[0]))
    return (int(m.group()) if m else 10**6, str(row[0]))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(_ACCEPTANCE, key=_order):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:>3} {title}: {detail}")
