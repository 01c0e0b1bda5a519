"""Scenario-weight models and forecast assembly.

The affine mixer keeps the composite map parameters -> forecast affine (no
simplex projection), which the tuning theory requires; weights may therefore
leave the simplex and forecast rows may exceed the disturbance bound (they
are flagged, not clipped). The softmax scorer is the language-model-like
alternative: proper simplex weights, but nonlinear in its parameters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..control.model import RiccatiSolution
from .features import ContextFeatures
from .library import LibraryError, ScenarioLibrary


def window_span(t: int, k: int, t_end: int) -> int:
    """Number of forecast rows at step t: min(t + k - 1, T - 1) - t + 1."""
    return min(t + k - 1, t_end - 1) - t + 1


@dataclass(frozen=True)
class PredictionWindow:
    t: int
    t_cal: int                      # last step covered by the forecast
    what: np.ndarray                # (t_cal - t + 1, n)
    weights: np.ndarray             # scenario weights that produced it
    exceeds_bound: bool             # any row norm above the library bound
    jac: Optional[np.ndarray] = None

    @property
    def length(self) -> int:
        return self.what.shape[0]


@dataclass
class AffineMixer:
    """Weights p = theta @ phi + base, affine in theta.

    ``theta`` is (count, d); ``center``/``diameter`` describe the feasible
    ball used by projection and by the bound evaluations.
    """

    theta: np.ndarray
    base: np.ndarray
    center: np.ndarray
    diameter: float

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        self.base = np.asarray(self.base, dtype=float)
        self.center = np.asarray(self.center, dtype=float)
        if self.theta.shape != self.center.shape:
            raise ValueError("theta and center must have equal shapes")
        if self.theta.shape[0] != self.base.shape[0]:
            raise ValueError("base length must match scenario count")
        if not self.diameter > 0:
            raise ValueError("diameter must be positive")

    def weights(self, feats: ContextFeatures, theta: Optional[np.ndarray] = None) -> np.ndarray:
        th = self.theta if theta is None else theta
        if th.shape[1] != feats.phi.shape[0]:
            raise ValueError("feature dimension mismatch")
        return th @ feats.phi + self.base

    def distance_from_center(self, theta: Optional[np.ndarray] = None) -> float:
        th = self.theta if theta is None else theta
        return float(np.linalg.norm(th - self.center))

    def project(self, theta: np.ndarray) -> np.ndarray:
        """Euclidean projection onto the ball of the configured diameter."""
        radius = self.diameter / 2.0
        delta = theta - self.center
        dist = np.linalg.norm(delta)
        if dist <= radius:
            return theta
        return self.center + delta * (radius / dist)


@dataclass
class SoftmaxScorer:
    """Simplex weights p = softmax(scores), scores = weights_matrix @ phi."""

    weights_matrix: np.ndarray

    def __post_init__(self):
        self.weights_matrix = np.asarray(self.weights_matrix, dtype=float)

    def scores(self, feats: ContextFeatures) -> np.ndarray:
        if self.weights_matrix.shape[1] != feats.phi.shape[0]:
            raise ValueError("feature dimension mismatch")
        return self.weights_matrix @ feats.phi

    def weights(self, feats: ContextFeatures, matrix: Optional[np.ndarray] = None) -> np.ndarray:
        mat = self.weights_matrix if matrix is None else matrix
        scores = mat @ feats.phi
        shifted = scores - scores.max()
        ex = np.exp(shifted)
        return ex / ex.sum()

    def log_weights(self, feats: ContextFeatures, matrix: Optional[np.ndarray] = None) -> np.ndarray:
        mat = self.weights_matrix if matrix is None else matrix
        scores = mat @ feats.phi
        shifted = scores - scores.max()
        return shifted - np.log(np.exp(shifted).sum())


def predict_window(
    weights: np.ndarray,
    lib: ScenarioLibrary,
    t: int,
    k: int,
    t_end: int,
    enforce_bound: bool = False,
) -> PredictionWindow:
    """Mix the scenario banks with the given weights into a forecast window."""
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (lib.count,):
        raise LibraryError(f"expected {lib.count} weights, got {weights.shape}")
    length = window_span(t, k, t_end)
    banks = lib.bank_stack(t, length)            # (count, length, n)
    what = np.einsum("s,sln->ln", weights, banks)
    norms = np.linalg.norm(what, axis=1)
    exceeds = bool((norms > lib.w_bound + 1e-12).any())
    if exceeds and enforce_bound:
        what = what.copy()
        over = norms > lib.w_bound
        what[over] *= (lib.w_bound / norms[over])[:, None]
        exceeds = False
    return PredictionWindow(
        t=t, t_cal=t + length - 1, what=what, weights=weights, exceeds_bound=exceeds
    )


def prediction_jacobian(
    mixer: AffineMixer,
    feats: ContextFeatures,
    lib: ScenarioLibrary,
    t: int,
    k: int,
    t_end: int,
) -> np.ndarray:
    """Exact Jacobian of the flattened forecast w.r.t. the flattened theta.

    Row (j, i) differentiates forecast entry [j, i]; column (s, c) varies
    theta[s, c]. The value is bank_s[j, i] * phi[c]; constant in theta.
    """
    length = window_span(t, k, t_end)
    banks = lib.bank_stack(t, length)                    # (S, L, n)
    flat = banks.reshape(lib.count, length * lib.n).T    # (L*n, S)
    return np.kron(flat, feats.phi[None, :]).reshape(
        length * lib.n, lib.count * feats.phi.shape[0]
    )


def scenario_decay_vectors(
    sol: RiccatiSolution, lib: ScenarioLibrary, t: int, k: int, t_end: int
) -> np.ndarray:
    """(count, n) array of m_s = sum_j (F^T)^j P bank_s[j] over the window.

    These are the per-scenario images of the forecast window under the
    decay-weighted sum; every loss gradient and discrepancy formula is built
    from them.
    """
    length = window_span(t, k, t_end)
    banks = lib.bank_stack(t, length)
    out = np.zeros((lib.count, sol.model.n))
    for j in range(length):
        out += banks[:, j, :] @ sol.ftp(j).T
    return out
