from pathlib import Path

import pytest

from toric_nl.cli import load_fan_text
from toric_nl.cox import CoxPolynomial, parse_polynomial

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


def load_fan(name):
    return load_fan_text((FIXTURES / f"{name}.fan").read_text())


def load_poly(fan, name):
    text = (FIXTURES / f"{name}.poly").read_text()
    return CoxPolynomial.from_terms(fan, parse_polynomial(text, fan.n))


@pytest.fixture(scope="session")
def p3():
    return load_fan("p3")


@pytest.fixture(scope="session")
def p111_3():
    return load_fan("p111_3")


@pytest.fixture(scope="session")
def cube():
    return load_fan("p1p1p1")


@pytest.fixture(scope="session")
def f2xp1():
    return load_fan("f2xp1")


@pytest.fixture(scope="session")
def p4():
    return load_fan("p4")


@pytest.fixture(scope="session")
def fermat4(p3):
    return load_poly(p3, "fermat4")


@pytest.fixture(scope="session")
def sextic(p111_3):
    return load_poly(p111_3, "sextic_p111_3")


# one line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
