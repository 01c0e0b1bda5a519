"""Planar tracking of an astroid path under random wind gusts.

The plant state is the deviation of the robot position from the target
(positions stacked with raw velocities), so the target's motion enters the
disturbance: w_t = [y_t - y_{t+1}; 0, 0] plus the wind kick on the velocity
components. Gusts hit a fixed set of steps with direction drawn per episode;
scripted warnings fire two steps ahead, optionally naming the quadrant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..control import RiccatiSolution, SystemModel, solve_dare
from ..l2d.features import Vocabulary
from ..l2d.library import ScenarioLibrary, load_library, register_trajectory_generator
from .streams import ContextStream

GUST_STEPS = (20, 25, 32, 35, 40, 84, 133, 145, 158, 215)

# quadrant names keyed by the signs of the raw wind draw (z1, z2)
QUADRANTS: Dict[Tuple[int, int], str] = {
    (1, 1): "northeast",
    (-1, 1): "northwest",
    (1, -1): "southeast",
    (-1, -1): "southwest",
}
QUADRANT_NAMES = tuple(QUADRANTS.values())

CALM_TEXT = "conditions calm, tracking nominal"
WARN_DIRECTIONAL = "strong {direction} wind expected within {lead} steps"
WARN_BLIND = "strong wind expected within {lead} steps, direction unknown"


@dataclass(frozen=True)
class RobotParams:
    t_len: int = 240
    gust_steps: tuple = GUST_STEPS
    gust_range: float = 45.0
    calm_range: float = 2.0
    coupling: float = 0.2
    scale: float = 2.0
    freq: float = 1.0 / 38.2
    lead: int = 2
    announce_direction: bool = True

    def __post_init__(self):
        if any(t < 0 for t in self.gust_steps):
            raise ValueError("gust steps must be nonnegative")
        # shortened horizons (live demos) keep only the in-horizon gusts
        object.__setattr__(
            self, "gust_steps", tuple(t for t in self.gust_steps if t < self.t_len)
        )
        if self.gust_range <= 0 or self.calm_range <= 0:
            raise ValueError("wind ranges must be positive")


def astroid_target(t: float, scale: float = 2.0, freq: float = 1.0 / 38.2) -> np.ndarray:
    return np.array(
        [scale * math.sin(freq * t) ** 3, scale * math.cos(freq * t) ** 3]
    )


def _drift(t: int, params: RobotParams) -> np.ndarray:
    y0 = astroid_target(t, params.scale, params.freq)
    y1 = astroid_target(t + 1, params.scale, params.freq)
    return np.array([y0[0] - y1[0], y0[1] - y1[1], 0.0, 0.0])


def _max_drift_norm(params: RobotParams) -> float:
    period = int(round(2 * math.pi / params.freq)) + 1
    return max(np.linalg.norm(_drift(t, params)) for t in range(period))


def disturbance_bound(params: RobotParams = RobotParams()) -> float:
    """Norm bound from the drift magnitude plus the worst-case wind kick."""
    wind = params.coupling * params.gust_range * math.sqrt(2.0)
    return _max_drift_norm(params) + wind


def make_robot_system(params: RobotParams = RobotParams()) -> tuple:
    c = params.coupling
    model = SystemModel(
        a=[[1, 0, c, 0], [0, 1, 0, c], [0, 0, 1, 0], [0, 0, 0, 1]],
        b=[[0, 0], [0, 0], [c, 0], [0, c]],
        q=np.diag([1.0, 1.0, 0.0, 0.0]),
        r=1e-2 * np.eye(2),
        w_bound=disturbance_bound(params),
    )
    return model, solve_dare(model)


def robot_disturbance(
    t: int, y_t: np.ndarray, y_next: np.ndarray, z: np.ndarray, coupling: float = 0.2
) -> np.ndarray:
    """Drift of the embedded target plus the wind kick on the velocities."""
    return np.array(
        [y_t[0] - y_next[0], y_t[1] - y_next[1], -coupling * z[0], -coupling * z[1]]
    )


def _quadrant_wind(name: str, params: RobotParams) -> np.ndarray:
    """Velocity-component mean of the wind kick conditioned on a quadrant."""
    mean_mag = params.gust_range / 2.0
    signs = next(s for s, n in QUADRANTS.items() if n == name)
    return np.array(
        [0.0, 0.0, -params.coupling * signs[0] * mean_mag,
         -params.coupling * signs[1] * mean_mag]
    )


def _register_generators() -> None:
    def drift_factory(cfg: dict, n: int):
        params = RobotParams(
            scale=cfg.get("scale", 2.0), freq=cfg.get("freq", 1.0 / 38.2)
        )
        return lambda t: _drift(t, params)

    def gusty_factory(cfg: dict, n: int):
        params = RobotParams(
            scale=cfg.get("scale", 2.0), freq=cfg.get("freq", 1.0 / 38.2)
        )
        gusts = set(cfg["gust_steps"])
        wind = np.asarray(cfg["wind"], dtype=float)

        def row(t: int) -> np.ndarray:
            base = _drift(t, params)
            return base + wind if t in gusts else base

        return row

    register_trajectory_generator("astroid_drift", drift_factory)
    register_trajectory_generator("astroid_drift_gusty", gusty_factory)


_register_generators()


def robot_library(params: RobotParams = RobotParams()) -> ScenarioLibrary:
    """Drift-following, still, and four directional gust scenarios.

    Gust banks know the fixed gust timetable (historic structure); only the
    direction is episode-specific and must come from context.
    """
    scenarios = [
        {
            "id": "track",
            "label": "target drift only",
            "keywords": ["calm"],
            "trajectory": {
                "kind": "procedural",
                "name": "astroid_drift",
                "params": {"scale": params.scale, "freq": params.freq},
            },
        },
        {
            "id": "still",
            "label": "no disturbance",
            "keywords": [],
            "trajectory": {"kind": "constant", "value": [0.0, 0.0, 0.0, 0.0]},
        },
    ]
    for name in QUADRANT_NAMES:
        scenarios.append(
            {
                "id": f"gust_{name}",
                "label": f"drift with {name} gusts",
                "keywords": ["wind", name],
                "trajectory": {
                    "kind": "procedural",
                    "name": "astroid_drift_gusty",
                    "params": {
                        "scale": params.scale,
                        "freq": params.freq,
                        "gust_steps": list(params.gust_steps),
                        "wind": _quadrant_wind(name, params).tolist(),
                    },
                },
            }
        )
    return load_library(
        {"n": 4, "scenarios": scenarios}, w_bound=disturbance_bound(params)
    )


def robot_vocabulary() -> Vocabulary:
    return Vocabulary(["calm", "wind", *QUADRANT_NAMES])


@dataclass
class RobotEpisode:
    w: np.ndarray
    contexts: List[str]
    x0: np.ndarray
    quadrants: Dict[int, str]
    stream: ContextStream


def build_robot_episode(params: RobotParams, seed) -> RobotEpisode:
    """Draw the wind, derive the per-episode warning stream, fix x0."""
    rng = np.random.default_rng(seed)
    t_len = params.t_len
    w = np.zeros((t_len, 4))
    quadrants: Dict[int, str] = {}
    events = []
    for t in range(t_len):
        hi = params.gust_range if t in params.gust_steps else params.calm_range
        z = rng.uniform(-hi, hi, 2)
        y_t = astroid_target(t, params.scale, params.freq)
        y_n = astroid_target(t + 1, params.scale, params.freq)
        w[t] = robot_disturbance(t, y_t, y_n, z, params.coupling)
        if t in params.gust_steps:
            name = QUADRANTS[(int(math.copysign(1, z[0])), int(math.copysign(1, z[1])))]
            quadrants[t] = name
            if params.announce_direction:
                text = WARN_DIRECTIONAL.format(direction=name, lead=params.lead)
            else:
                text = WARN_BLIND.format(lead=params.lead)
            events.append((t, text, f"gust_{name}"))
    stream = ContextStream(events=events, lead=params.lead, default_text=CALM_TEXT)
    y0 = astroid_target(0, params.scale, params.freq)
    y1 = astroid_target(1, params.scale, params.freq)
    x0 = np.array([0.0, 0.0, *( (y1 - y0) / params.coupling )])
    return RobotEpisode(
        w=w, contexts=stream.expand(t_len), x0=x0, quadrants=quadrants, stream=stream
    )


def reference_scorer(lib: ScenarioLibrary, vocab: Vocabulary, sharpness: float = 4.0) -> np.ndarray:
    """Hand-built score matrix mapping keywords to their scenarios.

    Used (scaled down) as the partially-informed initial scorer and in tests
    as a known-good target.
    """
    mat = np.zeros((lib.count, vocab.dim))
    kw_index = {kw: i for i, kw in enumerate(vocab.keywords)}
    track = lib.index_of("track")
    mat[track, kw_index["calm"]] = sharpness * math.sqrt(2.0)
    for name in QUADRANT_NAMES:
        row = lib.index_of(f"gust_{name}")
        mat[row, kw_index[name]] = sharpness * math.sqrt(3.0)
    return mat


def reference_base(lib: ScenarioLibrary) -> np.ndarray:
    """Context-free prior for the affine mixer: split drift-following and
    still, no directional commitment."""
    base = np.zeros(lib.count)
    base[lib.index_of("track")] = 0.5
    base[lib.index_of("still")] = 0.5
    return base


def reference_theta(lib: ScenarioLibrary, vocab: Vocabulary) -> np.ndarray:
    """Affine parameters that, with ``reference_base``, weight the drift bank
    fully on calm steps and the announced quadrant bank on warnings."""
    theta = np.zeros((lib.count, vocab.dim))
    kw_index = {kw: i for i, kw in enumerate(vocab.keywords)}
    track, still = lib.index_of("track"), lib.index_of("still")
    theta[track, kw_index["calm"]] = 0.5 * math.sqrt(2.0)
    theta[still, kw_index["calm"]] = -0.5 * math.sqrt(2.0)
    theta[track, kw_index["wind"]] = -0.5 * math.sqrt(3.0)
    theta[still, kw_index["wind"]] = -0.5 * math.sqrt(3.0)
    for name in QUADRANT_NAMES:
        theta[lib.index_of(f"gust_{name}"), kw_index[name]] = math.sqrt(3.0)
    return theta
