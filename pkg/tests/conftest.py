import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_density(rng, rank=4):
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    r = g @ g.conj().T
    return r / np.trace(r).real


def random_product_mixture(rng, k=5):
    rho = np.zeros((4, 4), dtype=complex)
    w = rng.dirichlet(np.ones(k))
    for wi in w:
        a = rng.normal(size=2) + 1j * rng.normal(size=2)
        b = rng.normal(size=2) + 1j * rng.normal(size=2)
        v = np.kron(a / np.linalg.norm(a), b / np.linalg.norm(b))
        rho += wi * np.outer(v, v.conj())
    return rho
