import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from hiercomm import Graph  # noqa: E402
from hiercomm.datasets import karate_club  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def karate():
    return karate_club()


@pytest.fixture
def triangle():
    return Graph.from_edges([(0, 1), (1, 2), (2, 0)])


@pytest.fixture
def star4():
    return Graph.from_edges([(0, 1), (0, 2), (0, 3), (0, 4)])


@pytest.fixture
def path5():
    return Graph.from_edges([("a", "b"), ("b", "c"), ("c", "d"), ("d", "e")])


@pytest.fixture
def acceptance_line():
    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} | {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
