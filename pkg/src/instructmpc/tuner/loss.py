"""Window-truncated surrogate loss.

Once the disturbances covered by a forecast window are all revealed, the
window admits the loss

    L(theta) = psi_hat(theta)^T H psi_hat(theta),
    psi_hat = sum_j (F^T)^j P (w_j - forecast_j(theta)),

a convex quadratic in theta on the affine path whose gradient only needs
the per-scenario decay vectors of the window.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..control.model import RiccatiSolution
from ..control.mpc import decay_weighted_sum
from ..l2d.features import ContextFeatures
from ..l2d.library import ScenarioLibrary
from ..l2d.models import AffineMixer, scenario_decay_vectors, window_span


class TunerError(Exception):
    pass


@dataclass
class LossWindow:
    """Forecast window frozen at step t together with the realized truth.

    Becomes complete when all covered disturbances have been observed;
    ``realized_tail`` and ``decay_vectors`` are derived once on completion.
    """

    t: int
    t_cal: int
    feats: ContextFeatures
    sol: RiccatiSolution
    lib: ScenarioLibrary
    w_rows: list = field(default_factory=list)
    _tail: Optional[np.ndarray] = None
    _decay: Optional[np.ndarray] = None

    @property
    def length(self) -> int:
        return self.t_cal - self.t + 1

    @property
    def complete(self) -> bool:
        return len(self.w_rows) == self.length

    def observe(self, w_row: np.ndarray) -> None:
        if self.complete:
            raise TunerError(f"window at t={self.t} already complete")
        self.w_rows.append(np.asarray(w_row, dtype=float))

    @property
    def w_real(self) -> np.ndarray:
        return np.asarray(self.w_rows)

    def realized_tail(self) -> np.ndarray:
        """sum_j (F^T)^j P w_j over the window."""
        if not self.complete:
            raise TunerError(f"window at t={self.t} is incomplete")
        if self._tail is None:
            self._tail = decay_weighted_sum(self.sol, self.w_real)
        return self._tail

    def decay_vectors(self) -> np.ndarray:
        """(count, n) per-scenario decay vectors m_s of this window."""
        if self._decay is None:
            self._decay = scenario_decay_vectors(
                self.sol, self.lib, self.t, self.length, self.t_cal + 1
            )
        return self._decay


def make_window(
    t: int,
    k: int,
    t_end: int,
    feats: ContextFeatures,
    sol: RiccatiSolution,
    lib: ScenarioLibrary,
) -> LossWindow:
    length = window_span(t, k, t_end)
    return LossWindow(t=t, t_cal=t + length - 1, feats=feats, sol=sol, lib=lib)


def _psi_hat(theta: np.ndarray, window: LossWindow, mixer: AffineMixer) -> np.ndarray:
    weights = mixer.weights(window.feats, theta=theta)
    return window.realized_tail() - weights @ window.decay_vectors()


def tailored_loss(theta: np.ndarray, window: LossWindow, mixer: AffineMixer) -> float:
    """psi_hat^T H psi_hat; nonnegative because H is positive semidefinite."""
    psi_hat = _psi_hat(theta, window, mixer)
    return float(psi_hat @ window.sol.h @ psi_hat)


def tailored_loss_gradient(
    theta: np.ndarray, window: LossWindow, mixer: AffineMixer
) -> np.ndarray:
    """Exact gradient w.r.t. theta, shaped like theta.

    d psi_hat / d theta[s, c] = -m_s * phi[c], so the gradient matrix is
    -2 outer(M @ (H @ psi_hat), phi).
    """
    psi_hat = _psi_hat(theta, window, mixer)
    decay = window.decay_vectors()
    return -2.0 * np.outer(decay @ (window.sol.h @ psi_hat), window.feats.phi)
