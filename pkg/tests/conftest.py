import numpy as np
import pytest

from instructmpc.control import SystemModel, solve_dare


def random_system(rng: np.random.Generator, n_max: int = 4, m_max: int = 3) -> SystemModel:
    """Random stabilizable plant with PD costs, open-loop scaled stable."""
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(1, m_max + 1))
    a = rng.uniform(-1.0, 1.0, (n, n))
    a *= 0.9 / max(np.abs(np.linalg.eigvals(a)).max(), 0.5)
    b = rng.uniform(-1.0, 1.0, (n, m))
    q_half = rng.uniform(-1.0, 1.0, (n, n))
    q = q_half @ q_half.T + 0.1 * np.eye(n)
    r_half = rng.uniform(-1.0, 1.0, (m, m))
    r = r_half @ r_half.T + 0.1 * np.eye(m)
    return SystemModel(a=a, b=b, q=q, r=r, w_bound=5.0)


@pytest.fixture
def scalar_model():
    return SystemModel(a=[[1.0]], b=[[1.0]], q=[[1.0]], r=[[1.0]], w_bound=1.0)


@pytest.fixture
def scalar_solution(scalar_model):
    return solve_dare(scalar_model)
