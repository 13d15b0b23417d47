import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260826)


def random_simplex(rng, n, concentration=1.0):
    """Dirichlet draw, floored away from exact zeros."""
    p = rng.dirichlet(np.full(n, concentration))
    p = np.maximum(p, 1e-12)
    return p / p.sum()
