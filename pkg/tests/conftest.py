import pytest

from fpcov.analytic import solve_analytic
from fpcov.model import get_problem, make_revenue_example
from fpcov.shooting import solve_shooting


@pytest.fixture(scope="session")
def revenue():
    return make_revenue_example(1.0)


@pytest.fixture(scope="session")
def revenue_nofz():
    return get_problem("revenue-nofz")


@pytest.fixture(scope="session")
def quadratic():
    return get_problem("quadratic")


@pytest.fixture(scope="session")
def shooting_solution(revenue):
    return solve_shooting(revenue, (0.0, 0.5))


@pytest.fixture(scope="session")
def upper_solution():
    return solve_analytic("upper", (2.0, 0.5))


@pytest.fixture(scope="session")
def lower_solution():
    return solve_analytic("lower", (-7.0, 3.0))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
