"""Fixed-point solver for the discrete algebraic Riccati equation."""

from __future__ import annotations

import logging

import numpy as np

from .model import (
    ControlError,
    DareConvergenceError,
    RiccatiSolution,
    SystemModel,
)

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 100_000


def _dare_rhs(model: SystemModel, p: np.ndarray) -> np.ndarray:
    a, b, q, r = model.a, model.b, model.q, model.r
    msum = r + b.T @ p @ b
    try:
        gain = np.linalg.solve(msum, b.T @ p @ a)
    except np.linalg.LinAlgError as exc:  # cannot happen for R > 0, but guard
        raise ControlError(f"R + B^T P B is singular: {exc}") from exc
    return q + a.T @ p @ a - a.T @ p @ b @ gain


def dare_residual(model: SystemModel, p: np.ndarray) -> float:
    """Frobenius norm of P - rhs(P)."""
    return float(np.linalg.norm(p - _dare_rhs(model, p), "fro"))


def solve_dare(
    model: SystemModel,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> RiccatiSolution:
    """Iterate P <- Q + A^T P A - A^T P B (R + B^T P B)^{-1} B^T P A from P0 = Q.

    Stops when the Frobenius change between successive iterates is <= tol.
    Raises ``DareConvergenceError`` (carrying the last residual) on failure.
    """
    if tol <= 0:
        raise ControlError("tol must be positive")
    q_min = np.linalg.eigvalsh(model.q).min()
    if q_min < 1e-12:
        logger.warning(
            "Q is only positive semidefinite (min eig %.2e); proceeding", q_min
        )
    p = model.q.copy()
    iterations = 0
    for iterations in range(1, max_iter + 1):
        p_next = _dare_rhs(model, p)
        change = np.linalg.norm(p_next - p, "fro")
        p = p_next
        if change <= tol:
            break
    else:
        raise DareConvergenceError(
            f"no convergence in {max_iter} iterations", dare_residual(model, p)
        )

    p = 0.5 * (p + p.T)  # enforce exact symmetry
    residual = dare_residual(model, p)
    if residual > 1e-9 * (1.0 + np.linalg.norm(p, "fro")):
        raise DareConvergenceError(
            f"converged iterate has residual {residual:.3e}", residual
        )

    b, r = model.b, model.r
    msum = r + b.T @ p @ b
    m_inv = np.linalg.inv(msum)
    k_gain = m_inv @ b.T @ p @ model.a
    f = model.a - b @ k_gain
    h = b @ m_inv @ b.T
    rho_f = float(np.abs(np.linalg.eigvals(f)).max())
    if rho_f >= 1.0:
        raise ControlError(f"closed loop is not contractive (rho = {rho_f:.6f})")
    return RiccatiSolution(
        model=model,
        p=p,
        k_gain=k_gain,
        f=f,
        h=h,
        m_inv=m_inv,
        rho_f=rho_f,
        norm_f=float(np.linalg.norm(f, 2)),
        residual=residual,
        iterations=iterations,
    )
