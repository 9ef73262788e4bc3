import logging

import pytest

from flightenergy import default_drone

for _name in ("jax", "absl"):
    logging.getLogger(_name).setLevel(logging.ERROR)


@pytest.fixture(scope="session")
def p():
    return default_drone()


# Acceptance verdicts, filled in by test_acceptance.py and echoed after the run
# so that they show without ``-s``.
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
