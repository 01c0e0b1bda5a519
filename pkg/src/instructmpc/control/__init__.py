"""Riccati machinery, the closed-form prediction-aware MPC law, cost
evaluation, the offline-optimal benchmark and the exact cost-gap identity."""

from .model import (
    ControlError,
    DareConvergenceError,
    DimensionError,
    EpisodeTrace,
    RiccatiSolution,
    StabilizabilityError,
    SystemModel,
)
from .riccati import solve_dare
from .mpc import (
    cost_gap_psi,
    decay_weighted_sum,
    evaluate_cost,
    mpc_action,
    offline_optimal,
    rollout,
    tail_transforms,
)
from .qp import finite_horizon_qp_oracle

__all__ = [
    "ControlError",
    "DareConvergenceError",
    "DimensionError",
    "EpisodeTrace",
    "RiccatiSolution",
    "StabilizabilityError",
    "SystemModel",
    "solve_dare",
    "mpc_action",
    "finite_horizon_qp_oracle",
    "evaluate_cost",
    "offline_optimal",
    "cost_gap_psi",
    "rollout",
    "decay_weighted_sum",
    "tail_transforms",
]
