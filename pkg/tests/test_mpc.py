import numpy as np
import pytest

from conftest import random_system
from instructmpc.control import (
    cost_gap_psi,
    evaluate_cost,
    finite_horizon_qp_oracle,
    mpc_action,
    offline_optimal,
    rollout,
    solve_dare,
)
from instructmpc.control.qp import qp_objective

GOLDEN_RATIO = (1.0 + np.sqrt(5.0)) / 2.0


def test_zero_state_zero_forecast_gives_zero_input(scalar_solution):
    u = mpc_action(scalar_solution, np.zeros(1), np.zeros((3, 1)))
    assert np.allclose(u, 0.0)


def test_scalar_one_step_closed_form(scalar_solution):
    # u = -(r + b^2 p)^{-1} b (p a x + p w_hat) with p the golden ratio
    u = mpc_action(scalar_solution, np.array([1.0]), np.array([[0.5]]))
    expected = -GOLDEN_RATIO * 1.5 / (1.0 + GOLDEN_RATIO)
    assert u[0] == pytest.approx(expected, rel=1e-12)
    assert u[0] == pytest.approx(-0.9271, abs=5e-5)


def test_matches_qp_oracle_on_random_instances():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        model = random_system(rng)
        sol = solve_dare(model)
        k = int(rng.integers(1, 9))
        x0 = rng.uniform(-2, 2, model.n)
        what = rng.uniform(-1, 1, (k, model.n))
        u_closed = mpc_action(sol, x0, what)
        u_qp = finite_horizon_qp_oracle(model, sol, x0, what, k)
        scale = max(1.0, np.linalg.norm(u_qp[0]))
        worst = max(worst, np.linalg.norm(u_closed - u_qp[0]) / scale)
    assert worst <= 1e-8


def test_qp_oracle_scalar_horizon_one(scalar_model, scalar_solution):
    # single-variable calculus: u = -(r + b^2 P)^{-1} b (P a x0 + P w0)
    x0, w0 = 0.7, -0.3
    u = finite_horizon_qp_oracle(
        scalar_model, scalar_solution, np.array([x0]), np.array([[w0]]), 1
    )
    p = scalar_solution.p[0, 0]
    assert u[0, 0] == pytest.approx(-(p * x0 + p * w0) / (1 + p), rel=1e-12)


def test_qp_zero_inputs_for_zero_data(scalar_model, scalar_solution):
    u = finite_horizon_qp_oracle(
        scalar_model, scalar_solution, np.zeros(1), np.zeros((4, 1)), 4
    )
    assert np.allclose(u, 0.0)


def test_evaluate_cost_trivial_sum(scalar_solution):
    trace = rollout(
        scalar_solution, np.array([1.0]), np.zeros((1, 1)), lambda t: np.zeros((1, 1))
    )
    # x0 = 1 costs 1; the rolled input and terminal state contribute the rest
    cost = evaluate_cost(trace, scalar_solution)
    manual = (
        trace.x[0] @ scalar_solution.model.q @ trace.x[0]
        + trace.u[0] @ scalar_solution.model.r @ trace.u[0]
        + trace.x[1] @ scalar_solution.p @ trace.x[1]
    )
    assert cost == pytest.approx(float(manual), rel=1e-12)
    assert cost >= 0.0


def test_offline_optimal_matches_full_horizon_qp():
    rng = np.random.default_rng(3)
    for _ in range(5):
        model = random_system(rng, n_max=3, m_max=2)
        sol = solve_dare(model)
        t_len = 12
        w = rng.uniform(-0.5, 0.5, (t_len, model.n))
        x0 = rng.uniform(-1, 1, model.n)
        trace, j_star = offline_optimal(sol, x0, w)
        u_qp = finite_horizon_qp_oracle(model, sol, x0, w, t_len)
        assert np.allclose(trace.u, u_qp, atol=1e-8)
        j_qp = qp_objective(model, sol, x0, w, u_qp)
        assert abs(j_star - j_qp) <= 1e-8 * max(1.0, abs(j_qp))


def test_offline_optimal_zero_case(scalar_solution):
    trace, j_star = offline_optimal(scalar_solution, np.zeros(1), np.zeros((6, 1)))
    assert j_star == pytest.approx(0.0, abs=1e-15)


def test_offline_optimal_beats_random_controllers():
    rng = np.random.default_rng(11)
    model = random_system(rng, n_max=3, m_max=2)
    sol = solve_dare(model)
    t_len = 20
    w = rng.uniform(-0.5, 0.5, (t_len, model.n))
    x0 = rng.uniform(-1, 1, model.n)
    _, j_star = offline_optimal(sol, x0, w)
    for _ in range(50):
        gain = rng.uniform(-0.5, 0.5, (model.m, model.n))
        x = x0.copy()
        j = 0.0
        xs, us = [x.copy()], []
        for t in range(t_len):
            u = -sol.k_gain @ x + gain @ x * 0.1 + rng.uniform(-0.2, 0.2, model.m)
            j += x @ model.q @ x + u @ model.r @ u
            x = model.a @ x + model.b @ u + w[t]
        j += x @ sol.p @ x
        assert j - j_star >= -1e-8 * max(1.0, j_star)


def test_cost_gap_identity_perfect_full_horizon_predictions():
    rng = np.random.default_rng(5)
    model = random_system(rng, n_max=3, m_max=2)
    sol = solve_dare(model)
    t_len = 15
    w = rng.uniform(-0.4, 0.4, (t_len, model.n))
    windows = [w[t:] for t in range(t_len)]
    psi, gap = cost_gap_psi(sol, windows, w)
    assert np.allclose(psi, 0.0, atol=1e-12)
    assert gap == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_cost_gap_identity_random_windows(seed):
    rng = np.random.default_rng(100 + seed)
    model = random_system(rng, n_max=3, m_max=2)
    sol = solve_dare(model)
    t_len = 60
    k = int(rng.integers(1, 7))
    w = rng.uniform(-0.5, 0.5, (t_len, model.n))
    x0 = rng.uniform(-1, 1, model.n)
    windows = [
        rng.uniform(-0.5, 0.5, (min(t + k - 1, t_len - 1) - t + 1, model.n))
        for t in range(t_len)
    ]
    trace = rollout(sol, x0, w, lambda t: windows[t])
    j_pi = evaluate_cost(trace, sol)
    _, j_star = offline_optimal(sol, x0, w)
    psi, gap = cost_gap_psi(sol, windows, w)
    assert gap >= 0.0
    assert abs(j_pi - j_star - gap) <= 1e-8 * max(1.0, j_star)


def test_trace_transition_residuals(scalar_solution):
    rng = np.random.default_rng(2)
    w = rng.uniform(-0.3, 0.3, (10, 1))
    trace = rollout(scalar_solution, np.array([0.5]), w, lambda t: w[t:])
    trace.validate(scalar_solution.model)
