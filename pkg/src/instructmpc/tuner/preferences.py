"""Preference pairs from realized windows and the pairwise scorer update.

For each completed window, every unordered pair of scenarios with strictly
different distances to the realized trajectory yields one (winner, loser)
item; exact ties yield nothing. The scorer update is one full-batch gradient
step on the mean of

    -log sigmoid( beta * [ (s_w - s_l) - (s_w_ref - s_l_ref) ] )

where s are log-probabilities under the softmax scorer and its frozen
reference.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from ..l2d.features import ContextFeatures
from ..l2d.library import ScenarioLibrary
from ..l2d.models import SoftmaxScorer
from .loss import LossWindow, TunerError


@dataclass(frozen=True)
class PreferenceItem:
    context_id: str
    winner: str
    loser: str
    t: int
    phi: np.ndarray


def build_preferences(window: LossWindow, lib: ScenarioLibrary) -> List[PreferenceItem]:
    """Strictly-ordered scenario pairs for one completed window."""
    if not window.complete:
        raise TunerError("cannot build preferences from an incomplete window")
    truth = window.w_real
    dists = [
        float(np.linalg.norm(truth - lib.bank(i, window.t, window.length)))
        for i in range(lib.count)
    ]
    items: List[PreferenceItem] = []
    for i in range(lib.count):
        for j in range(i + 1, lib.count):
            if dists[i] == dists[j]:
                continue
            wi, li = (i, j) if dists[i] < dists[j] else (j, i)
            items.append(
                PreferenceItem(
                    context_id=window.feats.context_id,
                    winner=lib.scenarios[wi].id,
                    loser=lib.scenarios[li].id,
                    t=window.t,
                    phi=window.feats.phi,
                )
            )
    return items


@dataclass
class PreferenceDataset:
    threshold: int
    items: List[PreferenceItem] = field(default_factory=list)
    total_collected: int = 0

    def extend(self, items: Sequence[PreferenceItem]) -> None:
        self.items.extend(items)
        self.total_collected += len(items)

    @property
    def ready(self) -> bool:
        return len(self.items) >= self.threshold

    def take_batch(self) -> List[PreferenceItem]:
        batch, self.items = self.items, []
        return batch

    def export_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["context_id", "winner", "loser", "t"])
            for item in self.items:
                writer.writerow([item.context_id, item.winner, item.loser, item.t])


def _margins(
    scorer_matrix: np.ndarray,
    ref_matrix: np.ndarray,
    batch: Sequence[PreferenceItem],
    lib: ScenarioLibrary,
    beta: float,
) -> np.ndarray:
    out = np.zeros(len(batch))
    for idx, item in enumerate(batch):
        wi = lib.index_of(item.winner)
        li = lib.index_of(item.loser)
        # log-prob differences: the normalizer cancels within one context
        cur = (scorer_matrix[wi] - scorer_matrix[li]) @ item.phi
        ref = (ref_matrix[wi] - ref_matrix[li]) @ item.phi
        out[idx] = beta * (cur - ref)
    return out


def dpo_loss(
    scorer: SoftmaxScorer,
    reference: SoftmaxScorer,
    batch: Sequence[PreferenceItem],
    lib: ScenarioLibrary,
    beta: float,
) -> float:
    """Mean -log sigmoid(margin) over the batch."""
    if not batch:
        raise TunerError("empty preference batch")
    margins = _margins(
        scorer.weights_matrix, reference.weights_matrix, batch, lib, beta
    )
    return float(np.mean(np.logaddexp(0.0, -margins)))


def dpo_update(
    scorer: SoftmaxScorer,
    reference: SoftmaxScorer,
    batch: Sequence[PreferenceItem],
    lib: ScenarioLibrary,
    beta: float,
    step_size: float,
) -> Tuple[SoftmaxScorer, float, float]:
    """One full-batch gradient step; returns (new scorer, loss before/after)."""
    if not batch:
        raise TunerError("empty preference batch")
    mat = scorer.weights_matrix
    ref = reference.weights_matrix
    margins = _margins(mat, ref, batch, lib, beta)
    loss_before = float(np.mean(np.logaddexp(0.0, -margins)))
    grad = np.zeros_like(mat)
    coeffs = (1.0 / (1.0 + np.exp(-margins)) - 1.0) * beta  # d/dm of -log sig
    for item, coef in zip(batch, coeffs):
        wi = lib.index_of(item.winner)
        li = lib.index_of(item.loser)
        grad[wi] += coef * item.phi
        grad[li] -= coef * item.phi
    grad /= len(batch)
    new_scorer = SoftmaxScorer(mat - step_size * grad)
    margins_after = _margins(new_scorer.weights_matrix, ref, batch, lib, beta)
    loss_after = float(np.mean(np.logaddexp(0.0, -margins_after)))
    return new_scorer, loss_before, loss_after
