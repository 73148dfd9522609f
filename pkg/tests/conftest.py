import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from fitland.core import build_aggregate, build_histogram  # noqa: E402
from fitland.problems import SumOfTermsProblem, make_toy_fig3  # noqa: E402


@pytest.fixture(scope="session")
def toy():
    return make_toy_fig3()


@pytest.fixture(scope="session")
def toy_agg(toy):
    return build_aggregate(toy)


@pytest.fixture(scope="session")
def sum55():
    return SumOfTermsProblem(5, 5)


@pytest.fixture(scope="session")
def sum55_hist(sum55):
    return build_histogram(sum55)


@pytest.fixture(scope="session")
def footnote_hist():
    from fitland.problems import make_footnote_tsp, tsp_census
    return tsp_census(make_footnote_tsp())


# one line per acceptance criterion, filled in by tests/test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
