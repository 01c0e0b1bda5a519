"""Batch quadratic-program reference solver for the receding-horizon problem.

Independent of the closed-form law: states are eliminated against the
dynamics, the strictly convex objective in the stacked inputs is assembled
densely and its stationarity system solved directly. Used by tests and
cross-checks only.
"""

from __future__ import annotations

import numpy as np

from .model import ControlError, DimensionError, RiccatiSolution, SystemModel


def finite_horizon_qp_oracle(
    model: SystemModel,
    sol: RiccatiSolution,
    x0: np.ndarray,
    what: np.ndarray,
    horizon: int,
) -> np.ndarray:
    """Minimize sum_{j<h} (x_j^T Q x_j + u_j^T R u_j) + x_h^T P x_h.

    subject to x_{j+1} = A x_j + B u_j + what_j, x_0 = x0. Returns the (h, m)
    optimal input stack.
    """
    if horizon < 1:
        raise DimensionError("horizon must be >= 1")
    n, m = model.n, model.m
    x0 = np.asarray(x0, dtype=float)
    what = np.atleast_2d(np.asarray(what, dtype=float))
    if what.shape != (horizon, n):
        raise DimensionError(f"what must be ({horizon}, {n}), got {what.shape}")

    a, b = model.a, model.b
    h = horizon
    # stacked predictions: X = s_x x0 + s_u U + s_w Wvec, X = (x_1 .. x_h)
    s_x = np.zeros((h * n, n))
    s_u = np.zeros((h * n, h * m))
    s_w = np.zeros((h * n, h * n))
    a_pow = [np.eye(n)]
    for _ in range(h):
        a_pow.append(a @ a_pow[-1])
    for i in range(h):
        s_x[i * n:(i + 1) * n] = a_pow[i + 1]
        for j in range(i + 1):
            blk = a_pow[i - j]
            s_u[i * n:(i + 1) * n, j * m:(j + 1) * m] = blk @ b
            s_w[i * n:(i + 1) * n, j * n:(j + 1) * n] = blk

    q_bar = np.zeros((h * n, h * n))
    for i in range(h - 1):
        q_bar[i * n:(i + 1) * n, i * n:(i + 1) * n] = model.q
    q_bar[(h - 1) * n:, (h - 1) * n:] = sol.p
    r_bar = np.kron(np.eye(h), model.r)

    offset = s_x @ x0 + s_w @ what.reshape(-1)
    hess = s_u.T @ q_bar @ s_u + r_bar
    lin = s_u.T @ q_bar @ offset
    try:
        u_flat = np.linalg.solve(hess, -lin)
    except np.linalg.LinAlgError as exc:  # guarded; impossible for R > 0
        raise ControlError(f"stationarity system is singular: {exc}") from exc
    return u_flat.reshape(h, m)


def qp_objective(
    model: SystemModel,
    sol: RiccatiSolution,
    x0: np.ndarray,
    what: np.ndarray,
    u_stack: np.ndarray,
) -> float:
    """Objective value of the finite-horizon problem at a given input stack."""
    h = u_stack.shape[0]
    x = np.asarray(x0, dtype=float)
    total = 0.0
    for j in range(h):
        total += x @ model.q @ x + u_stack[j] @ model.r @ u_stack[j]
        x = model.a @ x + model.b @ u_stack[j] + what[j]
    return float(total + x @ sol.p @ x)
