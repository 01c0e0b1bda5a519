"""Regime-wind benchmark plant for the learning-theory checks.

A fast-contracting two-state plant (closed-loop operator norm well below
one) driven by piecewise-constant directional winds. Regimes switch on a
fixed cadence, each announced by a context keyword, so the affine mixer has
a clean stationary mapping to learn and every constant in the regret bound
is computable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List

import numpy as np

from ..control import SystemModel, solve_dare
from ..l2d.features import Vocabulary
from ..l2d.library import ScenarioLibrary, load_library

DIRECTIONS = ("north", "south", "east", "west")
DIR_VECTORS: Dict[str, np.ndarray] = {
    "north": np.array([0.0, 1.0]),
    "south": np.array([0.0, -1.0]),
    "east": np.array([1.0, 0.0]),
    "west": np.array([-1.0, 0.0]),
}
CALM_TEXT = "conditions calm"
REGIME_TEXT = "steady {direction} wind regime in effect"


@dataclass(frozen=True)
class TheoryParams:
    t_len: int = 400
    regime_len: int = 30
    magnitude: float = 1.0
    noise: float = 0.3
    x0_scale: float = 0.0


def disturbance_bound(params: TheoryParams = TheoryParams()) -> float:
    return float(
        np.linalg.norm([params.magnitude + params.noise, params.noise]) + 1e-9
    )


def make_theory_system(params: TheoryParams = TheoryParams()) -> tuple:
    model = SystemModel(
        a=[[0.6, 0.2], [0.0, 0.5]],
        b=np.eye(2),
        q=np.eye(2),
        r=0.2 * np.eye(2),
        w_bound=disturbance_bound(params),
    )
    return model, solve_dare(model)


def theory_library(params: TheoryParams = TheoryParams()) -> ScenarioLibrary:
    scenarios = [
        {
            "id": "calm",
            "label": "no wind",
            "keywords": ["calm"],
            "trajectory": {"kind": "constant", "value": [0.0, 0.0]},
        }
    ]
    for name in DIRECTIONS:
        scenarios.append(
            {
                "id": name,
                "label": f"steady {name} wind",
                "keywords": [name],
                "trajectory": {
                    "kind": "constant",
                    "value": (params.magnitude * DIR_VECTORS[name]).tolist(),
                },
            }
        )
    return load_library(
        {"n": 2, "scenarios": scenarios}, w_bound=disturbance_bound(params)
    )


def theory_vocabulary() -> Vocabulary:
    return Vocabulary(["calm", *DIRECTIONS])


@dataclass
class TheoryEpisode:
    w: np.ndarray
    contexts: List[str]
    x0: np.ndarray


def build_theory_episode(params: TheoryParams, seed) -> TheoryEpisode:
    rng = np.random.default_rng(seed)
    t_len = params.t_len
    w = np.zeros((t_len, 2))
    contexts = [""] * t_len
    t = 0
    while t < t_len:
        regime = int(rng.integers(0, len(DIRECTIONS) + 1))
        span = min(params.regime_len, t_len - t)
        if regime == 0:
            base, text = np.zeros(2), CALM_TEXT
        else:
            name = DIRECTIONS[regime - 1]
            base = params.magnitude * DIR_VECTORS[name]
            text = REGIME_TEXT.format(direction=name)
        for j in range(span):
            w[t + j] = base + rng.uniform(-params.noise, params.noise, 2)
            contexts[t + j] = text
        t += span
    x0 = params.x0_scale * rng.uniform(-1.0, 1.0, 2)
    return TheoryEpisode(w=w, contexts=contexts, x0=x0)


def reference_theta(lib: ScenarioLibrary, vocab: Vocabulary) -> np.ndarray:
    """Affine parameters that put weight one on the announced regime."""
    theta = np.zeros((lib.count, vocab.dim))
    kw_index = {kw: i for i, kw in enumerate(vocab.keywords)}
    for name in DIRECTIONS:
        theta[lib.index_of(name), kw_index[name]] = np.sqrt(2.0)
    return theta


def reference_scorer(lib: ScenarioLibrary, vocab: Vocabulary, sharpness: float = 4.0) -> np.ndarray:
    mat = np.zeros((lib.count, vocab.dim))
    kw_index = {kw: i for i, kw in enumerate(vocab.keywords)}
    mat[lib.index_of("calm"), kw_index["calm"]] = sharpness * np.sqrt(2.0)
    for name in DIRECTIONS:
        mat[lib.index_of(name), kw_index[name]] = sharpness * np.sqrt(2.0)
    return mat
