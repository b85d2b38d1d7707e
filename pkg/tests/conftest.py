import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_triples(rng, n):
    """Random (N, kappa, q) with kappa in (0, 1/4] and q in (1, 6)."""
    N = rng.integers(2, 9, size=n)
    kappa = rng.uniform(1e-6, 0.25, size=n)
    kappa[::17] = 0.25
    q = 1.0 + rng.uniform(1e-3, 5.0, size=n)
    return list(zip(N.tolist(), kappa.tolist(), q.tolist()))
