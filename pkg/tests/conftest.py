import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo", derandomize=True, deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


def random_unimodular(rng, cond_max=50.0):
    """Well-conditioned random matrix with determinant 1."""
    while True:
        g = np.eye(3) + 0.6 * rng.normal(size=(3, 3))
        d = np.linalg.det(g)
        if d > 0.05 and np.linalg.cond(g) < cond_max:
            return g / np.cbrt(d)


JORDAN = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0, 1.0]])
CUSP_G1 = np.array([[1.0, 5.0, 1.0], [0.0, 3.0, 1.0], [0.0, -4.0, -1.0]])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
