"""Named experiment presets wired into runnable setups."""

from __future__ import annotations

from typing import Optional

import numpy as np

from . import energy as energy_mod
from . import robot as robot_mod
from . import theory as theory_mod
from .episode import ExogenousEnv, PresetSetup


def robot_setup(
    t_len: int = 240,
    k: int = 5,
    announce_direction: bool = True,
    zero_shot_scale: float = 0.5,
    dpo_beta: float = 1.0,
    dpo_step: float = 20.0,
    preference_threshold: int = 240,
    continual: bool = True,
) -> PresetSetup:
    params = robot_mod.RobotParams(
        t_len=t_len, announce_direction=announce_direction
    )
    model, sol = robot_mod.make_robot_system(params)
    lib = robot_mod.robot_library(params)
    vocab = robot_mod.robot_vocabulary()
    scorer0 = zero_shot_scale * robot_mod.reference_scorer(lib, vocab)

    def make_env(seed):
        episode = robot_mod.build_robot_episode(params, seed)
        return ExogenousEnv(
            a=model.a, b=model.b, w=episode.w,
            contexts=episode.contexts, x0=episode.x0,
        )

    return PresetSetup(
        name="robot",
        sol=sol,
        lib=lib,
        vocab=vocab,
        k=k,
        make_env=make_env,
        predictor_kind="softmax",
        tuner_kind="dpo",
        scorer0=scorer0,
        dpo_beta=dpo_beta,
        dpo_step=dpo_step,
        preference_threshold=preference_threshold,
        continual=continual,
    )


def theory_setup(
    t_len: int = 400,
    k: Optional[int] = 8,
    theta0_scale: float = 0.25,
    diameter: float = 3.0,
    grad_bound: object = "estimate",
    projection: bool = True,
) -> PresetSetup:
    params = theory_mod.TheoryParams(t_len=t_len)
    model, sol = theory_mod.make_theory_system(params)
    lib = theory_mod.theory_library(params)
    vocab = theory_mod.theory_vocabulary()
    theta_ref = theory_mod.reference_theta(lib, vocab)
    if k is None:
        from ..analysis.bounds import select_horizon

        k = select_horizon(sol.rho_f, t_len)

    def make_env(seed):
        episode = theory_mod.build_theory_episode(params, seed)
        return ExogenousEnv(
            a=model.a, b=model.b, w=episode.w,
            contexts=episode.contexts, x0=episode.x0,
        )

    return PresetSetup(
        name="theory",
        sol=sol,
        lib=lib,
        vocab=vocab,
        k=int(k),
        make_env=make_env,
        predictor_kind="affine",
        tuner_kind="tailored-ogd",
        theta0=theta0_scale * theta_ref,
        base_weights=np.zeros(lib.count),
        center=np.zeros_like(theta_ref),
        diameter=diameter,
        grad_bound=grad_bound,
        projection=projection,
    )


def energy_setup(
    days: int = 100,
    k: int = 12,
    zero_shot_scale: float = 0.5,
    dpo_beta: float = 1.0,
    dpo_step: float = 20.0,
    preference_threshold: int = 500,
) -> PresetSetup:
    params = energy_mod.EnergyParams(days=days)
    model, sol = energy_mod.make_energy_system(params)
    lib = energy_mod.energy_library(params)
    vocab = energy_mod.energy_vocabulary()
    scorer0 = zero_shot_scale * energy_mod.reference_scorer(lib, vocab)

    def make_env(seed):
        return energy_mod.build_energy_env(params, seed)

    return PresetSetup(
        name="energy",
        sol=sol,
        lib=lib,
        vocab=vocab,
        k=k,
        make_env=make_env,
        predictor_kind="softmax",
        tuner_kind="dpo",
        scorer0=scorer0,
        dpo_beta=dpo_beta,
        dpo_step=dpo_step,
        preference_threshold=preference_threshold,
        input_clamp=(0.0, 1.0),
        continual=False,
    )


PRESETS = {
    "robot": robot_setup,
    "theory": theory_setup,
    "energy": energy_setup,
}
