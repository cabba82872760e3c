from __future__ import annotations

import pytest

from boussinesq_ist import scatter
from boussinesq_ist.profiles import gaussian_profile, make_profile


@pytest.fixture(scope="session")
def zero_profile():
    return make_profile("zero")


@pytest.fixture(scope="session")
def gauss01():
    return gaussian_profile(0.1, 1.0, 0.0)


@pytest.fixture(scope="session")
def gauss_minus01():
    return gaussian_profile(-0.1, 1.0, 0.0)


@pytest.fixture(scope="session")
def line01(gauss01):
    return scatter.spectral_line(gauss01, scatter.default_k_grid())


@pytest.fixture(scope="session")
def line_minus01(gauss_minus01):
    return scatter.spectral_line(gauss_minus01, scatter.default_k_grid())



ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
