"""Regret of the adapted parameter sequence against the hindsight optimum."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from ..control.model import RiccatiSolution
from ..control.mpc import cost_gap_psi, evaluate_cost, rollout
from ..l2d.features import ContextFeatures
from ..l2d.library import ScenarioLibrary
from ..l2d.models import AffineMixer, predict_window


class RegretError(Exception):
    pass


@dataclass
class RegretReport:
    j_alg: float
    j_hindsight: float
    regret: float
    theta_star: np.ndarray
    psi_norms: np.ndarray
    ld_values: np.ndarray
    theorem1_rhs: float
    corollary_bounds: Dict[int, float] = field(default_factory=dict)
    hindsight_grad_norm: float = float("nan")
    grad_bound: float = float("nan")
    diameter: float = float("nan")

    def to_dict(self) -> dict:
        return {
            "j_alg": self.j_alg,
            "j_hindsight": self.j_hindsight,
            "regret": self.regret,
            "theta_star": self.theta_star.tolist(),
            "psi_norms": self.psi_norms.tolist(),
            "ld_values": self.ld_values.tolist(),
            "theorem1_rhs": self.theorem1_rhs,
            "corollary_bounds": {str(k): v for k, v in self.corollary_bounds.items()},
            "hindsight_grad_norm": self.hindsight_grad_norm,
            "grad_bound": self.grad_bound,
            "diameter": self.diameter,
        }


def replay_cost(
    sol: RiccatiSolution,
    lib: ScenarioLibrary,
    mixer: AffineMixer,
    theta: np.ndarray,
    feats: List[ContextFeatures],
    w: np.ndarray,
    x0: np.ndarray,
    k: int,
) -> float:
    """Episode cost under a fixed parameter with frozen contexts/disturbances."""
    t_len = w.shape[0]

    def window_fn(t: int) -> np.ndarray:
        weights = mixer.weights(feats[t], theta=theta)
        return predict_window(weights, lib, t, k, t_len).what

    trace = rollout(sol, x0, w, window_fn, [f.context_id for f in feats])
    return evaluate_cost(trace, sol)


def regret_report(
    sol: RiccatiSolution,
    lib: ScenarioLibrary,
    mixer: AffineMixer,
    thetas: List[np.ndarray],
    theta_star: np.ndarray,
    feats: List[ContextFeatures],
    w: np.ndarray,
    x0: np.ndarray,
    k: int,
    windows: Optional[list] = None,
    sum_ld: Optional[float] = None,
    rhs: Optional[float] = None,
    grad_bound: float = float("nan"),
    hindsight_grad_norm: float = float("nan"),
    ld_values: Optional[np.ndarray] = None,
    corollary_bounds: Optional[dict] = None,
) -> RegretReport:
    """Replay the recorded episode and the hindsight parameter, then diff.

    ``thetas`` is the recorded per-step parameter sequence; the actual-run
    cost is recomputed from it to certify the recorded trace.
    """
    t_len = w.shape[0]
    if len(thetas) != t_len or len(feats) != t_len:
        raise RegretError("theta/context sequences must match the horizon")

    def window_fn(t: int) -> np.ndarray:
        weights = mixer.weights(feats[t], theta=thetas[t])
        return predict_window(weights, lib, t, k, t_len).what

    trace = rollout(sol, x0, w, window_fn, [f.context_id for f in feats])
    j_alg = evaluate_cost(trace, sol)
    j_star = replay_cost(sol, lib, mixer, theta_star, feats, w, x0, k)
    psi, _ = cost_gap_psi(sol, trace.windows if windows is None else windows, w)
    return RegretReport(
        j_alg=j_alg,
        j_hindsight=j_star,
        regret=j_alg - j_star,
        theta_star=theta_star,
        psi_norms=np.linalg.norm(psi, axis=1),
        ld_values=np.asarray(ld_values) if ld_values is not None else np.array([]),
        theorem1_rhs=float(rhs) if rhs is not None else float("nan"),
        corollary_bounds=corollary_bounds or {},
        hindsight_grad_norm=hindsight_grad_norm,
        grad_bound=grad_bound,
        diameter=mixer.diameter,
    )
