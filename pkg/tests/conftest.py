import numpy as np
import pytest

from lindosc.fock_core import DensityMatrix


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)


def enveloped_density(dim: int, rng, ratio: float = 0.4) -> DensityMatrix:
    """Full-rank random mixed state whose Fock support decays like a
    thermal tail with ratio ``ratio``; keeps truncation leakage tiny."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    env = ratio ** (np.arange(dim) / 2.0)
    m = env[:, None] * a
    return DensityMatrix.from_matrix(m @ m.conj().T)
