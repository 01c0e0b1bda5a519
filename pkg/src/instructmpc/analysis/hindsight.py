"""Best fixed parameter in hindsight over the feasible ball.

On the affine path the episode cost as a function of a fixed theta is

    J(theta) = J_opt + sum_t psi_t(theta)^T H psi_t(theta)

with psi_t affine in theta, i.e. a convex quadratic. It is minimized over
the ball by accelerated projected gradient descent and certified by the
projected-gradient norm at the returned point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..control.model import RiccatiSolution
from ..control.mpc import tail_transforms
from ..l2d.library import ScenarioLibrary
from ..l2d.models import scenario_decay_vectors, window_span


class HindsightError(Exception):
    def __init__(self, message: str, grad_norm: float):
        super().__init__(message)
        self.grad_norm = grad_norm


@dataclass
class EpisodeQuadratic:
    """Vectorized pieces of J(theta) - J_opt for one episode.

    decay[t] holds the per-scenario decay vectors of the window at t,
    tails[t] the realized full-horizon tail, phis[t] the frozen features.
    """

    sol: RiccatiSolution
    decay: np.ndarray      # (T, S, n)
    tails: np.ndarray      # (T, n)
    phis: np.ndarray       # (T, d)
    base: np.ndarray       # (S,)

    @classmethod
    def build(
        cls,
        sol: RiccatiSolution,
        lib: ScenarioLibrary,
        phis: np.ndarray,
        base: np.ndarray,
        w: np.ndarray,
        k: int,
    ) -> "EpisodeQuadratic":
        t_len = w.shape[0]
        decay = np.stack(
            [scenario_decay_vectors(sol, lib, t, k, t_len) for t in range(t_len)]
        )
        return cls(
            sol=sol,
            decay=decay,
            tails=tail_transforms(sol, w),
            phis=np.asarray(phis, dtype=float),
            base=np.asarray(base, dtype=float),
        )

    def psi(self, theta: np.ndarray) -> np.ndarray:
        weights = self.phis @ theta.T + self.base   # (T, S)
        return self.tails - np.einsum("ts,tsn->tn", weights, self.decay)

    def gap(self, theta: np.ndarray) -> float:
        psi = self.psi(theta)
        return float(np.einsum("ti,ij,tj->", psi, self.sol.h, psi))

    def grad(self, theta: np.ndarray) -> np.ndarray:
        psi_h = self.psi(theta) @ self.sol.h        # (T, n)
        coeff = np.einsum("tsn,tn->ts", self.decay, psi_h)
        return -2.0 * np.einsum("ts,td->sd", coeff, self.phis)

    def lipschitz(self) -> float:
        """Upper bound on the curvature of the quadratic."""
        h_norm = np.linalg.norm(self.sol.h, 2)
        total = 0.0
        for t in range(self.decay.shape[0]):
            v_norm = np.linalg.norm(self.decay[t], 2)
            total += 2.0 * h_norm * (v_norm ** 2) * float(self.phis[t] @ self.phis[t])
        return total


@dataclass
class HindsightResult:
    theta: np.ndarray
    grad_norm: float
    iterations: int
    gap: float


def _project(theta: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    delta = theta - center
    dist = np.linalg.norm(delta)
    if dist <= radius:
        return theta
    return center + delta * (radius / dist)


def hindsight_theta(
    quad: EpisodeQuadratic,
    center: np.ndarray,
    diameter: float,
    tol: float = 1e-10,
    max_iter: int = 100_000,
) -> HindsightResult:
    """Accelerated projected gradient descent with restart on the ball.

    Certifies first-order optimality via the projected-gradient mapping
    norm; raises ``HindsightError`` carrying the final value on failure.
    """
    radius = diameter / 2.0
    step = 1.0 / max(quad.lipschitz(), 1e-300)
    theta_prev = center.copy()
    momentum = theta_prev.copy()
    value_prev = quad.gap(theta_prev)
    pg_norm = float("inf")
    for iteration in range(1, max_iter + 1):
        theta = _project(momentum - step * quad.grad(momentum), center, radius)
        pg = theta - _project(theta - step * quad.grad(theta), center, radius)
        pg_norm = float(np.linalg.norm(pg)) / step
        if pg_norm <= tol:
            return HindsightResult(
                theta=theta, grad_norm=pg_norm, iterations=iteration,
                gap=quad.gap(theta),
            )
        value = quad.gap(theta)
        if value > value_prev:          # restart acceleration when not monotone
            momentum = theta.copy()
        else:
            beta = (iteration - 1) / (iteration + 2)
            momentum = theta + beta * (theta - theta_prev)
        theta_prev, value_prev = theta, value
    raise HindsightError(
        f"projected gradient {pg_norm:.3e} above tol after {max_iter} iterations",
        pg_norm,
    )
