from functools import lru_cache

import pytest

from semiplanes.fixtures import plane_records
from semiplanes.semifield import SemifieldTable


@lru_cache(maxsize=None)
def table_of(label: str) -> SemifieldTable:
    return SemifieldTable.from_codes(list(plane_records()[label].tuple))


@pytest.fixture(scope="session")
def records():
    return plane_records()


@pytest.fixture(scope="session")
def plane_table():
    return table_of


# acceptance results, printed once at the end of the run
ACCEPTANCE: list[tuple[int, str, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n, status, text in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"{status} criterion {n:2d}: {text}")
