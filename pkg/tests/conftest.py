import numpy as np
import pytest

from crudecal import from_arrays, validate_predictions


@pytest.fixture
def three_point_cal():
    """z-scores exactly {-1, 0, 1}."""
    return validate_predictions([(0.0, 1.0, -1.0), (0.0, 1.0, 0.0), (0.0, 1.0, 1.0)])


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def make_set(z, mu=None, sigma=None):
    z = np.asarray(z, dtype=float)
    mu = np.zeros_like(z) if mu is None else np.asarray(mu, dtype=float)
    sigma = np.ones_like(z) if sigma is None else np.asarray(sigma, dtype=float)
    return from_arrays(mu, sigma, mu + sigma * z)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
