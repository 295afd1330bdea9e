import numpy as np
import pytest

from polarsuper import specfun

P6_GAMMAS = (0.5, -0.2, 0.2, 0.3)


@pytest.fixture(scope="session")
def p6_solution():
    p = specfun.P6Params(*P6_GAMMAS)
    sol = specfun.p6_integrate(p, 0.5, 0.25, 0.5, np.linspace(0.05, 0.95, 181))
    assert not sol.truncated
    return p, sol


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    lines = [v for rep in terminalreporter.stats.get("passed", []) + terminalreporter.stats.get("failed", [])
             for k, v in getattr(rep, "user_properties", ()) if k == "acceptance"]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
