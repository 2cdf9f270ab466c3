import re

import pytest

_CRITERIA: dict[str, str] = {}


@pytest.fixture
def criterion():
    """Record a one-line verdict for an acceptance criterion."""

    def record(number, passed, detail):
        _CRITERIA[str(number)] = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    def order(label):
        number, rest = re.match(r"(\d+)(.*)", label).groups()
        return int(number), rest

    for key in sorted(_CRITERIA, key=order):
        terminalreporter.write_line(_CRITERIA[key])
