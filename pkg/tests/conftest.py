"""Shared result reporting for the acceptance checks.

Each acceptance test records exactly one line with its measured values
through the ``announce`` fixture. The lines print inline (visible under
``pytest -s``) and are replayed in a terminal section at the end of the
run, so the per-check numbers survive output capturing.
"""

import pytest

_LINES = []


@pytest.fixture
def announce():
    def _announce(label: str, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'} {label}: {detail}"
        _LINES.append(line)
        print(line)
        return ok

    return _announce


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _LINES:
        terminalreporter.section("acceptance checks")
        for line in _LINES:
            terminalreporter.write_line(line)
