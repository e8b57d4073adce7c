import random
from fractions import Fraction

import pytest

_acceptance: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    _acceptance.append((name, "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in _acceptance:
        terminalreporter.write_line(f"{status}  {name}")


@pytest.fixture
def rng():
    return random.Random(20240611)


def random_rational(rng, lo=-5, hi=5, den=12):
    return Fraction(rng.randint(lo * den, hi * den), rng.randint(1, den))
