import numpy as np
import pytest

from memphase.channel import DensityMatrix
from memphase.correlation import PhaseCovariance


def random_feasible_point(rng: np.random.Generator, g_lo: float = 0.2, g_hi: float = 0.999):
    """A random (g, mu1, mu2) inside the feasibility region."""
    mu1 = rng.uniform(0.0, 1.0)
    mu2 = rng.uniform(max(0.0, 2.0 * mu1 * mu1 - 1.0), mu1)
    g = rng.uniform(g_lo, g_hi)
    return g, mu1, mu2


def random_feasible_covariance(rng: np.random.Generator, n_uses: int = 3) -> PhaseCovariance:
    """Random PSD Toeplitz phase covariance (inside the feasible band at n=3)."""
    if n_uses == 1:
        mu = [1.0]
    elif n_uses == 2:
        mu = [1.0, rng.uniform(0.0, 1.0)]
    elif n_uses == 3:
        _, mu1, mu2 = random_feasible_point(rng)
        mu = [1.0, mu1, mu2]
    else:
        # mixture of exponentially decaying correlations: PSD at any order
        weights = rng.dirichlet(np.ones(3))
        rates = rng.uniform(0.0, 1.0, size=3)
        mu = [float(weights @ rates**m) for m in range(n_uses)]
        mu[0] = 1.0
    g = rng.uniform(0.2, 0.999)
    return PhaseCovariance.from_damping(g, mu)


def random_density_matrix(rng: np.random.Generator, n_qubits: int) -> DensityMatrix:
    """Random full-rank density matrix (Wishart construction)."""
    dim = 1 << n_qubits
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = a @ a.conj().T
    return DensityMatrix(m / m.trace())


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
