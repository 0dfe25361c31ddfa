import functools

import pytest

from fareystat.farey import enumerate_farey

ACCEPTANCE_LINES = []


@functools.lru_cache(maxsize=None)
def farey(n, Q):
    """Shared enumerations; FareySequence is immutable so caching is safe."""
    return enumerate_farey(n, Q)


@pytest.fixture
def farey_seq():
    return farey


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
