"""Closed-form MPC action, rollouts, cost evaluation and the cost-gap identity.

The control law used everywhere is

    u_t = -(R + B^T P B)^{-1} B^T ( P A x_t + sum_j (F^T)^j P w_hat_j )

where the sum runs over the forecast rows. The offline-optimal benchmark is
the same law fed the realized future disturbances, and the gap of any
forecast-driven rollout to that benchmark equals sum_t psi_t^T H psi_t with
psi_t the (F^T)-weighted difference between realized and forecast tails.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .model import DimensionError, EpisodeTrace, RiccatiSolution


def decay_weighted_sum(sol: RiccatiSolution, rows: np.ndarray) -> np.ndarray:
    """sum_j (F^T)^j P rows[j] for a (L, n) stack of rows."""
    rows = np.atleast_2d(rows)
    acc = np.zeros(sol.model.n)
    for j in range(rows.shape[0]):
        acc = acc + sol.ftp(j) @ rows[j]
    return acc


def tail_transforms(sol: RiccatiSolution, w: np.ndarray) -> np.ndarray:
    """All realized tails r_t = sum_{tau>=t} (F^T)^(tau-t) P w_tau at once.

    Backward recursion r_t = P w_t + F^T r_{t+1}; returns a (T, n) array.
    """
    t_len = w.shape[0]
    out = np.zeros((t_len + 1, sol.model.n))
    ft = sol.f.T
    for t in range(t_len - 1, -1, -1):
        out[t] = sol.p @ w[t] + ft @ out[t + 1]
    return out[:t_len]


def mpc_action(sol: RiccatiSolution, x: np.ndarray, window: np.ndarray) -> np.ndarray:
    """Closed-form receding-horizon input for the given forecast window."""
    x = np.asarray(x, dtype=float)
    window = np.atleast_2d(np.asarray(window, dtype=float))
    n = sol.model.n
    if x.shape != (n,):
        raise DimensionError(f"state must have shape ({n},), got {x.shape}")
    if window.shape[0] < 1 or window.shape[1] != n:
        raise DimensionError(f"window must be (L, {n}) with L >= 1, got {window.shape}")
    acc = sol.p @ sol.model.a @ x + decay_weighted_sum(sol, window)
    return -sol.m_inv @ sol.model.b.T @ acc


def evaluate_cost(trace: EpisodeTrace, sol: RiccatiSolution) -> float:
    """sum_t (x_t^T Q x_t + u_t^T R u_t) + x_T^T P x_T."""
    q, r = sol.model.q, sol.model.r
    state_cost = np.einsum("ti,ij,tj->", trace.x[:-1], q, trace.x[:-1])
    input_cost = np.einsum("ti,ij,tj->", trace.u, r, trace.u)
    terminal = trace.x[-1] @ sol.p @ trace.x[-1]
    return float(state_cost + input_cost + terminal)


def rollout(
    sol: RiccatiSolution,
    x0: np.ndarray,
    w: np.ndarray,
    window_fn: Callable[[int], np.ndarray],
    context_ids: Optional[Sequence[str]] = None,
) -> EpisodeTrace:
    """Roll the closed-form controller forward under realized disturbances.

    ``window_fn(t)`` supplies the forecast matrix used at step t.
    """
    model = sol.model
    t_len = w.shape[0]
    x = np.zeros((t_len + 1, model.n))
    u = np.zeros((t_len, model.m))
    stage = np.zeros(t_len)
    windows = []
    x[0] = x0
    for t in range(t_len):
        win = np.atleast_2d(window_fn(t))
        windows.append(win)
        u[t] = mpc_action(sol, x[t], win)
        stage[t] = x[t] @ model.q @ x[t] + u[t] @ model.r @ u[t]
        x[t + 1] = model.a @ x[t] + model.b @ u[t] + w[t]
    ids = list(context_ids) if context_ids is not None else [""] * t_len
    k = max(win.shape[0] for win in windows)
    return EpisodeTrace(
        x=x, u=u, w=np.asarray(w, dtype=float), windows=windows,
        stage_costs=stage, context_ids=ids, k=k,
    )


def offline_optimal(
    sol: RiccatiSolution, x0: np.ndarray, w: np.ndarray
) -> Tuple[EpisodeTrace, float]:
    """Benchmark rollout with the full realized disturbance sequence."""
    w = np.asarray(w, dtype=float)
    t_len = w.shape[0]
    trace = rollout(sol, x0, w, lambda t: w[t:t_len])
    return trace, evaluate_cost(trace, sol)


def cost_gap_psi(
    sol: RiccatiSolution,
    windows: Sequence[np.ndarray],
    w: np.ndarray,
) -> Tuple[np.ndarray, float]:
    """Per-step prediction-error functionals psi_t and their H-weighted sum.

    psi_t = sum_{tau>=t} (F^T)^(tau-t) P w_tau
            - sum over the window rows of (F^T)^j P w_hat_j.
    The returned gap equals J(controller) - J(offline optimal) exactly for
    the rollout that used these windows.
    """
    w = np.asarray(w, dtype=float)
    t_len = w.shape[0]
    if len(windows) != t_len:
        raise DimensionError("one window per step is required")
    tails = tail_transforms(sol, w)
    psi = np.zeros((t_len, sol.model.n))
    for t in range(t_len):
        psi[t] = tails[t] - decay_weighted_sum(sol, windows[t])
    gap = float(np.einsum("ti,ij,tj->", psi, sol.h, psi))
    return psi, gap
