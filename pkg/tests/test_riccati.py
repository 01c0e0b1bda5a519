import numpy as np
import pytest

from instructmpc.control import (
    ControlError,
    DareConvergenceError,
    StabilizabilityError,
    SystemModel,
    solve_dare,
)
from instructmpc.control.riccati import dare_residual

GOLDEN_RATIO = (1.0 + np.sqrt(5.0)) / 2.0


def test_scalar_no_future_coupling():
    # a = 0 removes every forward term, so the fixed point is Q itself
    model = SystemModel(a=[[0.0]], b=[[1.0]], q=[[1.0]], r=[[1.0]], w_bound=1.0)
    sol = solve_dare(model)
    assert sol.p[0, 0] == pytest.approx(1.0, abs=1e-12)


def test_scalar_golden_ratio(scalar_model):
    # positive root of p^2 - p - 1 = 0
    sol = solve_dare(scalar_model)
    assert sol.p[0, 0] == pytest.approx(GOLDEN_RATIO, abs=1e-12)


def test_residual_and_gains_reproducible(scalar_model):
    sol = solve_dare(scalar_model)
    assert dare_residual(scalar_model, sol.p) <= 1e-9 * (1 + np.linalg.norm(sol.p))
    residuals = sol.gain_residuals()
    assert all(v <= 1e-12 for v in residuals.values())


@pytest.mark.parametrize("seed", range(12))
def test_random_systems_satisfy_invariants(seed):
    from conftest import random_system

    rng = np.random.default_rng(seed)
    model = random_system(rng)
    sol = solve_dare(model)
    assert dare_residual(model, sol.p) <= 1e-9 * (1 + np.linalg.norm(sol.p, "fro"))
    assert sol.rho_f < 1.0
    eigs = np.linalg.eigvalsh(sol.p)
    assert eigs.min() >= -1e-9


def test_non_stabilizable_rejected():
    # uncontrollable unstable mode: diagonal growth with no input channel
    with pytest.raises(StabilizabilityError):
        SystemModel(
            a=[[2.0, 0.0], [0.0, 0.5]],
            b=[[0.0], [1.0]],
            q=np.eye(2),
            r=[[1.0]],
            w_bound=1.0,
        )


def test_indefinite_r_rejected():
    with pytest.raises(ControlError):
        SystemModel(a=[[1.0]], b=[[1.0]], q=[[1.0]], r=[[-1.0]], w_bound=1.0)


def test_max_iter_exhaustion_carries_residual(scalar_model):
    with pytest.raises(DareConvergenceError) as err:
        solve_dare(scalar_model, tol=1e-16, max_iter=3)
    assert err.value.residual > 0
