"""Delayed projected online-gradient updates.

The gradient consumed at step t is that of the window which started k - 1
steps earlier, evaluated at the parameter stored when that window opened.
During the first k steps no update happens (the loss is defined as zero
there). After the gradient step the iterate is projected back onto the
feasible ball; projection is on by default and switchable for ablations.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from ..l2d.features import ContextFeatures
from ..l2d.library import ScenarioLibrary
from ..l2d.models import AffineMixer
from ..control.model import RiccatiSolution
from .loss import LossWindow, TunerError, make_window, tailored_loss, tailored_loss_gradient


def learning_rate(t: int, diameter: float, grad_bound: float, k: int) -> float:
    """Step size D / (G * sqrt(2 (2k - 1) (t + 1))), decreasing in t."""
    if diameter <= 0 or grad_bound <= 0:
        raise TunerError("diameter and gradient bound must be positive")
    if k < 1 or t < 0:
        raise TunerError("need k >= 1 and t >= 0")
    return diameter / (grad_bound * math.sqrt(2.0 * (2 * k - 1) * (t + 1)))


@dataclass
class DelayedGradientTuner:
    """Single-writer state of the delayed online-gradient loop."""

    mixer: AffineMixer
    sol: RiccatiSolution
    lib: ScenarioLibrary
    k: int
    t_end: int
    grad_bound: float
    projection: bool = True
    t: int = 0
    history: "OrderedDict[int, tuple]" = field(default_factory=OrderedDict)
    pending: Dict[int, LossWindow] = field(default_factory=dict)
    last_loss: float = float("nan")
    last_eta: float = float("nan")
    last_grad_norm: float = 0.0

    @property
    def theta(self) -> np.ndarray:
        return self.mixer.theta

    def begin_step(self, t: int, feats: ContextFeatures) -> None:
        """Freeze (theta_t, feats_t) and open the window starting at t."""
        if t != self.t:
            raise TunerError(f"expected step {self.t}, got {t}")
        self.history[t] = (self.mixer.theta.copy(), feats)
        while len(self.history) > self.k:
            self.history.popitem(last=False)
        self.pending[t] = make_window(t, self.k, self.t_end, feats, self.sol, self.lib)

    def observe(self, t: int, w_row: np.ndarray) -> None:
        """Feed the revealed disturbance into every window covering step t."""
        for start, window in self.pending.items():
            if start <= t <= window.t_cal:
                window.observe(w_row)

    def ogd_step(self, t: int) -> None:
        """theta_{t+1} = Pi( theta_t - eta_t grad L_{t-k+1}(theta_{t-k+1}) ).

        Must be called once per step, after ``observe(t, w_t)``.
        """
        if t != self.t:
            raise TunerError(f"expected step {self.t}, got {t}")
        self.last_eta = learning_rate(t, self.mixer.diameter, self.grad_bound, self.k)
        if t >= self.k:
            start = t - self.k + 1
            window = self.pending.get(start)
            if window is None or not window.complete:
                raise TunerError(f"window starting at {start} is not complete")
            if start not in self.history:
                raise TunerError(f"no stored parameter for step {start}")
            theta_old, _ = self.history[start]
            grad = tailored_loss_gradient(theta_old, window, self.mixer)
            self.last_loss = tailored_loss(theta_old, window, self.mixer)
            self.last_grad_norm = float(np.linalg.norm(grad))
            theta_new = self.mixer.theta - self.last_eta * grad
            if self.projection:
                theta_new = self.mixer.project(theta_new)
            self.mixer.theta = theta_new
            del self.pending[start]
        else:
            self.last_loss = 0.0
            self.last_grad_norm = 0.0
        self.t = t + 1

    def drain(self) -> list:
        """Windows still pending at episode end (never used for updates)."""
        return [self.pending[s] for s in sorted(self.pending)]
