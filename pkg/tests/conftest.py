import numpy as np
import pytest

from truncmoment.core import AtomicMeasure, moments_of_measure


def random_measure(rng, n, r, scale=1.0):
    atoms = rng.normal(size=(r, n)) * scale
    weights = rng.uniform(0.2, 2.0, size=r)
    return AtomicMeasure(atoms, weights)


def brute_moments(atoms, weights, basis):
    """Moments by explicit loops: independent of the vectorized core routine."""
    out = []
    for a in basis:
        tot = 0.0
        for u, w in zip(atoms, weights):
            term = w
            for x, e in zip(u, a):
                term *= x ** e
            tot += term
        out.append(tot)
    return np.array(out)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def data_dir():
    from importlib import resources
    return resources.files("truncmoment").joinpath("data")
