"""Loss discrepancy, gradient-bound estimation and the explicit bounds.

The discrepancy between the window-truncated surrogate loss and the true
decision loss is, on the affine path, independent of the parameter: the two
losses share their Jacobian, so the gradient gap is 2 J^T H times the
realized disturbance tail beyond the window. Its closed-form bound decays
geometrically in the window length, either through the operator norm of the
closed-loop matrix (when below one) or through Gelfand constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..control.model import RiccatiSolution
from ..l2d.library import ScenarioLibrary
from ..l2d.models import window_span


class BoundError(Exception):
    pass


@dataclass
class BoundConstants:
    diameter: float        # feasible-ball diameter
    grad_bound: float      # uniform loss-gradient bound
    model_grad_bound: float  # bound on the forecast-map Jacobian norm
    w_bound: float
    norm_p: float
    norm_h: float
    norm_f: float
    rho: float
    c_gelfand: float

    def validate(self) -> None:
        vals = [
            self.diameter, self.grad_bound, self.model_grad_bound,
            self.w_bound, self.norm_p, self.norm_h, self.rho, self.c_gelfand,
        ]
        if any(not v > 0 for v in vals):
            raise BoundError("all bound constants must be positive")


def gelfand_constant(sol: RiccatiSolution, max_power: int = 200) -> float:
    """Smallest C with ||F^t|| <= C rho^t observed over t <= max_power."""
    best = 1.0
    mat = np.eye(sol.model.n)
    for t in range(1, max_power + 1):
        mat = sol.f @ mat
        best = max(best, np.linalg.norm(mat, 2) / sol.rho_f ** t)
    return float(best)


def model_gradient_bound(
    lib: ScenarioLibrary, phis: np.ndarray, k: int, t_end: int
) -> float:
    """Exact max over steps of the forecast-Jacobian operator norm.

    The Jacobian at step t factors as V_t (I kron phi_t^T) with V_t the
    (L n, S) matrix of flattened banks, so its norm is ||V_t|| * ||phi_t||.
    """
    best = 0.0
    for t in range(t_end):
        length = window_span(t, k, t_end)
        banks = lib.bank_stack(t, length)
        v = banks.reshape(lib.count, length * lib.n).T
        best = max(best, np.linalg.norm(v, 2) * float(np.linalg.norm(phis[t])))
    return best


def compute_bound_constants(
    sol: RiccatiSolution,
    lib: ScenarioLibrary,
    phis: np.ndarray,
    k: int,
    t_end: int,
    diameter: float,
    grad_bound: float,
) -> BoundConstants:
    consts = BoundConstants(
        diameter=diameter,
        grad_bound=grad_bound,
        model_grad_bound=model_gradient_bound(lib, phis, k, t_end),
        w_bound=lib.w_bound,
        norm_p=float(np.linalg.norm(sol.p, 2)),
        norm_h=float(np.linalg.norm(sol.h, 2)),
        norm_f=sol.norm_f,
        rho=sol.rho_f,
        c_gelfand=gelfand_constant(sol),
    )
    consts.validate()
    return consts


def _window_decay_and_tail(
    sol: RiccatiSolution,
    lib: ScenarioLibrary,
    t: int,
    k: int,
    w: np.ndarray,
) -> tuple:
    from ..l2d.models import scenario_decay_vectors  # local to avoid cycle
    from ..control.mpc import decay_weighted_sum

    t_len = w.shape[0]
    length = window_span(t, k, t_len)
    decay = scenario_decay_vectors(sol, lib, t, k, t_len)
    # tail beyond the window: sum_{tau >= t + length} (F^T)^(tau - t) P w_tau
    tail = np.zeros(sol.model.n)
    if t + length < t_len:
        rest = decay_weighted_sum(sol, w[t + length:])
        tail = np.linalg.matrix_power(sol.f.T, length) @ rest
    return decay, tail


def loss_discrepancy(
    sol: RiccatiSolution,
    lib: ScenarioLibrary,
    phi: np.ndarray,
    t: int,
    k: int,
    w: np.ndarray,
) -> float:
    """Exact affine-path discrepancy at step t given the full realization.

    Equals || 2 J^T H tail || = 2 ||phi|| ||M (H tail)|| with M the window's
    per-scenario decay vectors; zero when the window reaches the horizon end.
    """
    decay, tail = _window_decay_and_tail(sol, lib, t, k, w)
    coeff = decay @ (sol.h @ tail)
    return float(2.0 * np.linalg.norm(phi) * np.linalg.norm(coeff))


def loss_discrepancy_sampled(
    loss_grad_fn,
    true_grad_fn,
    center: np.ndarray,
    diameter: float,
    samples: int = 256,
    seed: int = 0,
) -> dict:
    """Sampled supremum of the gradient gap for non-affine models.

    Evaluates the gap at the center and at ``samples`` points on the ball
    boundary; reported with a flag because it is an estimate, not a bound.
    """
    rng = np.random.default_rng(seed)
    radius = diameter / 2.0
    best = float(np.linalg.norm(loss_grad_fn(center) - true_grad_fn(center)))
    flat = center.reshape(-1)
    for _ in range(samples):
        direction = rng.standard_normal(flat.shape[0])
        direction /= np.linalg.norm(direction)
        point = (flat + radius * direction).reshape(center.shape)
        gap = float(np.linalg.norm(loss_grad_fn(point) - true_grad_fn(point)))
        best = max(best, gap)
    return {"value": best, "sampled": True, "samples": samples}


def corollary_bound(consts: BoundConstants, k: int, mode: str = "auto") -> float:
    """Explicit geometric discrepancy bound at window length k.

    Norm path: 2 L W ||P||^2 ||H|| ||F||^k / (1 - ||F||)^2, valid only when
    ||F|| < 1. Gelfand path: the same expression with ||F||^j replaced by
    C rho^j, giving 2 L W ||P||^2 ||H|| C^2 rho^k / (1 - rho)^2.
    """
    if k < 1:
        raise BoundError("k must be >= 1")
    consts.validate()
    lead = 2.0 * consts.model_grad_bound * consts.w_bound * consts.norm_p ** 2 * consts.norm_h
    if mode not in ("auto", "norm", "gelfand"):
        raise BoundError(f"unknown mode '{mode}'")
    if mode == "norm" or (mode == "auto" and consts.norm_f < 1.0):
        if consts.norm_f >= 1.0:
            raise BoundError(
                f"norm path needs ||F|| < 1 but ||F|| = {consts.norm_f:.6f}; "
                "use the Gelfand path"
            )
        return lead * consts.norm_f ** k / (1.0 - consts.norm_f) ** 2
    return lead * consts.c_gelfand ** 2 * consts.rho ** k / (1.0 - consts.rho) ** 2


def theorem_rhs(
    diameter: float, grad_bound: float, k: int, t_len: int, sum_ld: float
) -> float:
    """2 G D sqrt((k - 1/2) T) + D sum_LD + (k - 1) G D."""
    if diameter <= 0 or grad_bound <= 0 or k < 1 or t_len < 1:
        raise BoundError("inputs must be positive")
    return (
        2.0 * grad_bound * diameter * math.sqrt((k - 0.5) * t_len)
        + diameter * sum_ld
        + (k - 1) * grad_bound * diameter
    )


def select_horizon(rho: float, t_len: int) -> int:
    """Smallest k with rho^k <= 1/T: ceil(ln T / ln(1/rho))."""
    if not 0.0 < rho < 1.0:
        raise BoundError(f"rho must lie in (0, 1), got {rho}")
    if t_len < 2:
        raise BoundError("T must be >= 2")
    return max(1, math.ceil(math.log(t_len) / math.log(1.0 / rho)))


def estimate_grad_bound(
    sol: RiccatiSolution,
    lib: ScenarioLibrary,
    phis: np.ndarray,
    w: np.ndarray,
    base: np.ndarray,
    center: np.ndarray,
    diameter: float,
    k: int,
    inflation: float = 1.5,
) -> float:
    """Inflated exact bound on sup over the ball of the loss-gradient norm.

    The gradient is affine in theta: its norm over the ball is at most the
    center value plus (D/2) times the operator norm of the quadratic-term
    matrix 2 J^T H J, which factors through the small S x S matrix V^T H V.
    """
    from ..control.mpc import decay_weighted_sum
    from ..l2d.models import scenario_decay_vectors

    t_len = w.shape[0]
    worst = 0.0
    h_norm_ops = sol.h
    for t in range(t_len):
        length = window_span(t, k, t_len)
        decay = scenario_decay_vectors(sol, lib, t, k, t_len)   # (S, n)
        tail = decay_weighted_sum(sol, w[t:t + length])
        weights = center @ phis[t] + base
        psi_hat = tail - weights @ decay
        center_grad = 2.0 * np.linalg.norm(decay @ (h_norm_ops @ psi_hat)) * float(
            np.linalg.norm(phis[t])
        )
        small = decay @ h_norm_ops @ decay.T                    # V^T H V
        curvature = 2.0 * float(np.linalg.norm(small, 2)) * float(
            phis[t] @ phis[t]
        )
        worst = max(worst, center_grad + (diameter / 2.0) * curvature)
    return inflation * worst
