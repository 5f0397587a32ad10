import random
from fractions import Fraction

import pytest

from colmkt.cli import bundled_path
from colmkt.market import ExchangeSpace, load_market, zero_sum_generators_from_partition
from colmkt.random_markets import random_claim, random_nca_suite, random_suite

SUITE_SEED = 20240611
SUITE_SIZE = 200


@pytest.fixture(scope="session")
def fig1():
    return load_market(bundled_path("fig1.json"))


@pytest.fixture(scope="session")
def fig2():
    return load_market(bundled_path("fig2.json"))


@pytest.fixture(scope="session")
def fig1_Y(fig1):
    return zero_sum_generators_from_partition(fig1, 1)


@pytest.fixture(scope="session")
def det_Y():
    return ExchangeSpace()


@pytest.fixture(scope="session")
def nca_suite():
    """200 seeded markets satisfying NCA, each with one random claim."""
    rng = random.Random(SUITE_SEED + 1)
    out = []
    for model, Y in random_nca_suite(SUITE_SIZE, SUITE_SEED):
        out.append((model, Y, random_claim(rng, model)))
    return out


@pytest.fixture(scope="session")
def raw_suite():
    return random_suite(SUITE_SIZE, SUITE_SEED + 7)


def F(x):
    return Fraction(x)


_criteria = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        _criteria[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name in sorted(_criteria, key=lambda n: int(n.split("_")[1])):
        verdict = "PASS" if _criteria[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"{name}: {verdict}")
