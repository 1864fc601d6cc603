import numpy as np
import pytest


def random_metric(rng, n, scale=1.0):
    """Random symmetric zero-diagonal nonnegative matrix (not necessarily
    triangle-valid; fine for distortion arithmetic)."""
    A = rng.random((n, n)) * scale
    D = np.triu(A, 1)
    return D + D.T


def euclidean_metric(rng, n, dim=3, scale=1.0):
    """Distance matrix of random points (a genuine metric)."""
    P = rng.random((n, dim)) * scale
    diff = P[:, None, :] - P[None, :, :]
    D = np.sqrt((diff * diff).sum(-1))
    D = np.triu(D, 1)
    return D + D.T


def naive_distortion_p(plan, D_X, D_Y, p):
    """Quadruple-loop oracle for the p-distortion (no factorization)."""
    n, m = plan.shape
    total = 0.0
    for i in range(n):
        for j in range(m):
            for k in range(n):
                for l in range(m):
                    total += abs(D_X[i, k] - D_Y[j, l]) ** p * plan[i, j] * plan[k, l]
    return 0.5 * total ** (1.0 / p)


def naive_quadratic_energy(plan, D_X, D_Y):
    """Quadruple-loop oracle for E = sum (DX - DY)^2 plan plan."""
    n, m = plan.shape
    total = 0.0
    for i in range(n):
        for j in range(m):
            for k in range(n):
                for l in range(m):
                    total += (D_X[i, k] - D_Y[j, l]) ** 2 * plan[i, j] * plan[k, l]
    return total


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
