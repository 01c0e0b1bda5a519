"""Deterministic seeded environments: planar tracking with wind gusts,
battery energy management with time-of-use prices, and a regime-wind
benchmark plant for the learning-theory checks."""

from .streams import ContextStream
from .robot import (
    RobotParams,
    astroid_target,
    make_robot_system,
    robot_disturbance,
    build_robot_episode,
    robot_library,
)
from .theory import TheoryParams, make_theory_system, build_theory_episode, theory_library
from .energy import EnergyParams, EnergyEnv, energy_price, energy_step, make_energy_system
from .episode import EpisodeResult, EpisodeRunner, make_runner, run_episode

__all__ = [
    "ContextStream",
    "RobotParams",
    "astroid_target",
    "make_robot_system",
    "robot_disturbance",
    "build_robot_episode",
    "robot_library",
    "TheoryParams",
    "make_theory_system",
    "build_theory_episode",
    "theory_library",
    "EnergyParams",
    "EnergyEnv",
    "energy_price",
    "energy_step",
    "make_energy_system",
    "EpisodeResult",
    "EpisodeRunner",
    "make_runner",
    "run_episode",
]
