import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fhslab.params import make_params
from fhslab.profiles import Grid, candidate_extremal

settings.register_profile("fhslab", deadline=None, derandomize=True, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("fhslab")


@pytest.fixture(scope="session")
def grid():
    return Grid()


@pytest.fixture(scope="session")
def p3():
    return make_params(3, 2.0, 0.5, 0.0)


@pytest.fixture(scope="session")
def p1():
    return make_params(1, 2.0, 0.4, 0.0)


@pytest.fixture(scope="session")
def U3(p3, grid):
    return candidate_extremal(p3, grid)


@pytest.fixture(scope="session")
def U1(p1, grid):
    return candidate_extremal(p1, grid)


def random_monotone(rng, grid, dim, kappa, params=None, support=None):
    """Positive non-increasing profile: random staircase envelope with a power tail."""
    from fhslab.profiles import RadialProfile

    r = grid.nodes
    scale = 10 ** rng.uniform(-1, 1)
    env = (1.0 + r / scale) ** (-kappa)
    noise = 0.5 + rng.random(r.size)
    vals = np.maximum.accumulate((env * noise)[::-1])[::-1]
    vals = vals / vals[0]
    if support is not None:
        vals = np.where(r >= support, 0.0, vals)
    return RadialProfile(grid, vals, kappa, dim, "linear", params)


def pytest_terminal_summary(terminalreporter):
    """Repeat the one-line acceptance verdicts recorded by tests/test_acceptance.py."""
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            lines += [v for k, v in getattr(rep, "user_properties", []) if k == "acceptance"]
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
