"""Closed-loop learning: window-truncated surrogate loss and its gradient,
the delayed projected online-gradient update with its decreasing step
schedule, and preference-pair construction with the reference-anchored
pairwise update for the softmax scorer."""

from .loss import LossWindow, TunerError, tailored_loss, tailored_loss_gradient
from .ogd import DelayedGradientTuner, learning_rate
from .preferences import (
    PreferenceDataset,
    PreferenceItem,
    build_preferences,
    dpo_loss,
    dpo_update,
)

__all__ = [
    "LossWindow",
    "TunerError",
    "tailored_loss",
    "tailored_loss_gradient",
    "learning_rate",
    "DelayedGradientTuner",
    "PreferenceItem",
    "PreferenceDataset",
    "build_preferences",
    "dpo_loss",
    "dpo_update",
]
