"""Post-hoc certification: hindsight-optimal parameter, regret, loss
discrepancy, gradient-bound estimation and the explicit performance bounds."""

from .hindsight import HindsightError, HindsightResult, hindsight_theta
from .regret import RegretReport, regret_report, replay_cost
from .bounds import (
    BoundConstants,
    compute_bound_constants,
    corollary_bound,
    estimate_grad_bound,
    gelfand_constant,
    loss_discrepancy,
    loss_discrepancy_sampled,
    model_gradient_bound,
    select_horizon,
    theorem_rhs,
)

__all__ = [
    "HindsightError",
    "HindsightResult",
    "hindsight_theta",
    "RegretReport",
    "regret_report",
    "replay_cost",
    "BoundConstants",
    "compute_bound_constants",
    "corollary_bound",
    "estimate_grad_bound",
    "gelfand_constant",
    "loss_discrepancy",
    "loss_discrepancy_sampled",
    "model_gradient_bound",
    "select_horizon",
    "theorem_rhs",
]
