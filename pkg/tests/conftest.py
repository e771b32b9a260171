import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("repo")

A1 = np.array([[1, 1], [0, 1]], dtype=complex)
D1 = np.diag([1, 0]).astype(complex)
P1 = np.array([[1, 1], [0, 0]], dtype=complex)
N1 = np.array([[0, 1], [0, 0]], dtype=complex)
SWAP = np.array([[0, 1], [1, 0]], dtype=complex)


@pytest.fixture
def a1():
    return A1.copy()


@pytest.fixture
def d1():
    return D1.copy()


def close(x, y, tol=1e-10):
    x, y = np.asarray(x), np.asarray(y)
    return x.shape == y.shape and np.linalg.norm(x - y, 2) <= tol * max(1.0, np.linalg.norm(y, 2))
