"""Experiment orchestration: config -> setup -> episodes -> traces/summary.

The tuned variant chains model state across seeds when the config asks for
continual learning (episodes then run in seed order); everything else is
per-episode independent. Affine runs get full regret certification
(hindsight parameter, discrepancy series, bound evaluations) attached to
the summary.
"""

from __future__ import annotations

import json
import time
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from ..analysis.bounds import (
    compute_bound_constants,
    corollary_bound,
    loss_discrepancy,
    select_horizon,
    theorem_rhs,
)
from ..analysis.hindsight import EpisodeQuadratic, hindsight_theta
from ..analysis.regret import regret_report
from ..control import SystemModel, solve_dare
from ..l2d.features import Vocabulary, featurize
from ..l2d.library import load_library
from ..sims import energy as energy_mod
from ..sims import robot as robot_mod
from ..sims import theory as theory_mod
from ..sims.episode import EpisodeResult, ExogenousEnv, PresetSetup, run_episode
from .config import ConfigError, RunConfig
from .traces import trace_file_digest, write_trace


class ExperimentError(Exception):
    pass


def _reference_structures(scenario: str, lib, vocab):
    if scenario == "robot":
        return robot_mod.reference_scorer(lib, vocab), robot_mod.reference_theta(lib, vocab)
    if scenario == "theory":
        return theory_mod.reference_scorer(lib, vocab), theory_mod.reference_theta(lib, vocab)
    if scenario == "energy":
        return energy_mod.reference_scorer(lib, vocab), energy_mod.reference_theta(lib, vocab)
    return None, None


def build_setup(config: RunConfig) -> PresetSetup:
    opts = config.scenario_options
    if config.scenario == "robot":
        params = robot_mod.RobotParams(
            t_len=config.t_len,
            announce_direction=bool(opts.get("announce_direction", True)),
        )
        model, sol = robot_mod.make_robot_system(params)
        lib = robot_mod.robot_library(params)
        vocab = robot_mod.robot_vocabulary()

        def make_env(seed):
            episode = robot_mod.build_robot_episode(params, seed)
            return ExogenousEnv(model.a, model.b, episode.w, episode.contexts, episode.x0)

    elif config.scenario == "theory":
        params = theory_mod.TheoryParams(t_len=config.t_len)
        model, sol = theory_mod.make_theory_system(params)
        lib = theory_mod.theory_library(params)
        vocab = theory_mod.theory_vocabulary()

        def make_env(seed):
            episode = theory_mod.build_theory_episode(params, seed)
            return ExogenousEnv(model.a, model.b, episode.w, episode.contexts, episode.x0)

    elif config.scenario == "energy":
        if config.t_len % 24 != 0:
            raise ConfigError("[run.T] energy horizon must be a multiple of 24")
        params = energy_mod.EnergyParams(days=config.t_len // 24)
        model, sol = energy_mod.make_energy_system(params)
        lib = energy_mod.energy_library(params)
        vocab = energy_mod.energy_vocabulary()

        def make_env(seed):
            return energy_mod.build_energy_env(params, seed)

    elif config.scenario == "custom":
        sys_doc = config.custom["system"]
        model = SystemModel(
            a=np.asarray(sys_doc["A"], dtype=float),
            b=np.asarray(sys_doc["B"], dtype=float),
            q=np.asarray(sys_doc["Q"], dtype=float),
            r=np.asarray(sys_doc["R"], dtype=float),
            w_bound=float(sys_doc.get("w_bound", 1.0)),
        )
        sol = solve_dare(model)
        lib = load_library(config.custom["library"], w_bound=model.w_bound)
        vocab = Vocabulary(lib.all_keywords() or ["context"])
        w_rows = np.asarray(config.custom["disturbance"]["rows"], dtype=float)
        ctx_rows = list(config.custom["contexts"])
        x0 = np.asarray(config.custom.get("x0", np.zeros(model.n)), dtype=float)

        def make_env(seed):
            t_len = config.t_len
            w = np.array([w_rows[t % len(w_rows)] for t in range(t_len)])
            contexts = [ctx_rows[t % len(ctx_rows)] for t in range(t_len)]
            return ExogenousEnv(model.a, model.b, w, contexts, x0)

    else:
        raise ConfigError(f"[run.scenario] unknown scenario {config.scenario}")

    k = config.k
    if k == "auto":
        k = select_horizon(sol.rho_f, config.t_len)

    scorer_ref, theta_ref = _reference_structures(config.scenario, lib, vocab)
    zs = float(config.l2d.get("zero_shot_scale", 0.5))
    theta_scale = float(config.l2d.get("theta_scale", 0.25))

    theta0 = base = center = None
    scorer0 = None
    if config.l2d["model"] == "affine":
        if theta_ref is None:
            theta_ref = np.zeros((lib.count, vocab.dim))
        theta0 = theta_scale * theta_ref
        default_base = 1.0 / lib.count if config.scenario == "energy" else 0.0
        base = np.full(lib.count, config.l2d.get("base_weight", default_base))
        if config.scenario == "robot":
            base = robot_mod.reference_base(lib)
        center = np.zeros_like(theta0)
    elif config.l2d["model"] == "softmax":
        if scorer_ref is None:
            scorer_ref = np.zeros((lib.count, vocab.dim))
        scorer0 = zs * scorer_ref

    return PresetSetup(
        name=config.scenario,
        sol=sol,
        lib=lib,
        vocab=vocab,
        k=int(k),
        make_env=make_env,
        predictor_kind=config.l2d["model"],
        tuner_kind=config.tuner["kind"],
        theta0=theta0,
        base_weights=base,
        center=center,
        diameter=float(config.tuner.get("D", 3.0)),
        grad_bound=config.tuner.get("G", "estimate"),
        projection=bool(config.tuner.get("projection", True)),
        scorer0=scorer0,
        dpo_beta=float(config.tuner.get("beta", 1.0)),
        dpo_step=float(config.tuner.get("step_size", 20.0)),
        preference_threshold=int(config.tuner.get("threshold", 240)),
        continual=bool(config.tuner.get("continual", config.scenario == "robot")),
        input_clamp=(0.0, 1.0) if config.scenario == "energy" else None,
        external_cmd=config.l2d.get("cmd"),
    )


def certify_affine_episode(
    setup: PresetSetup, result: EpisodeResult, corollary_ks: Optional[range] = None
) -> dict:
    """Hindsight optimum, discrepancy series and bound evaluations."""
    sol, lib, k = setup.sol, setup.lib, setup.k
    w = result.trace.w
    t_len = w.shape[0]
    phis = np.array([f.phi for f in result.feats])
    base = np.asarray(setup.base_weights, dtype=float)
    quad = EpisodeQuadratic.build(sol, lib, phis, base, w, k)
    center = np.asarray(setup.center, dtype=float)
    hind = hindsight_theta(quad, center, setup.diameter)
    ld = np.array(
        [loss_discrepancy(sol, lib, phis[t], t, k, w) for t in range(t_len)]
    )
    grad_bound = result.grad_bound
    if not np.isfinite(grad_bound):
        from ..analysis.bounds import estimate_grad_bound

        grad_bound = estimate_grad_bound(
            sol, lib, phis, w, base, center, setup.diameter, k
        )
    rhs = theorem_rhs(setup.diameter, grad_bound, k, t_len, float(ld.sum()))
    bounds_table: Dict[int, float] = {}
    if corollary_ks:
        consts = compute_bound_constants(
            sol, lib, phis, max(corollary_ks), t_len, setup.diameter, grad_bound
        )
        for kk in corollary_ks:
            bounds_table[kk] = corollary_bound(consts, kk)
    report = regret_report(
        sol, lib,
        mixer_from_setup(setup),
        result.thetas,
        hind.theta,
        result.feats,
        w,
        result.trace.x[0],
        k,
        windows=result.trace.windows,
        sum_ld=float(ld.sum()),
        rhs=rhs,
        grad_bound=grad_bound,
        hindsight_grad_norm=hind.grad_norm,
        ld_values=ld,
        corollary_bounds=bounds_table,
    )
    return report.to_dict()


def mixer_from_setup(setup: PresetSetup):
    from ..l2d.models import AffineMixer

    return AffineMixer(
        theta=np.array(setup.theta0, dtype=float),
        base=np.array(setup.base_weights, dtype=float),
        center=np.array(setup.center, dtype=float),
        diameter=setup.diameter,
    )


def run_experiment(
    config: RunConfig,
    out_dir: Optional[str] = None,
    certify: bool = True,
) -> dict:
    """All (variant x seed) episodes, traces on disk, summary dict returned."""
    setup = build_setup(config)
    out = Path(out_dir or config.out_dir or "runs/latest")
    out.mkdir(parents=True, exist_ok=True)
    overrides = {int(t): str(text) for t, text in config.instructions}
    started = time.time()
    summary: dict = {
        "config": {"scenario": config.scenario, "T": config.t_len, "k": setup.k,
                   "seeds": config.seeds, "variants": config.variants},
        "variants": {},
    }
    manifest: List[dict] = []
    try:
        for variant in config.variants:
            entries = []
            state = None
            for seed in config.seeds:
                chain = setup.continual and variant == "tuned"
                result = run_episode(
                    setup, variant, seed,
                    model_state=state if chain else None,
                    overrides=overrides or None,
                )
                if chain:
                    state = result.model_state
                trace_path = out / f"trace_{variant}_{seed}.csv"
                write_trace(result, trace_path)
                entry = {
                    "seed": seed,
                    "cost": result.cost,
                    "trace": trace_path.name,
                    "digest": trace_file_digest(trace_path),
                    "totals": result.total_extra,
                }
                if (
                    certify
                    and variant == "tuned"
                    and setup.predictor_kind == "affine"
                    and setup.tuner_kind == "tailored-ogd"
                ):
                    entry["regret_report"] = certify_affine_episode(setup, result)
                entries.append(entry)
                manifest.append({"variant": variant, "seed": seed, "ok": True})
            costs = np.array([e["cost"] for e in entries])
            block = {
                "episodes": entries,
                "mean_cost": float(costs.mean()),
                "var_cost": float(costs.var()),
            }
            bills = [
                e["totals"].get("electricity_cost") for e in entries
                if "electricity_cost" in e["totals"]
            ]
            if bills:
                block["mean_electricity_cost"] = float(np.mean(bills))
            summary["variants"][variant] = block
    except Exception as exc:
        (out / "manifest.json").write_text(
            json.dumps({"completed": manifest, "error": str(exc)}, indent=2)
        )
        raise ExperimentError(f"experiment aborted: {exc}") from exc

    summary["runtime_s"] = time.time() - started
    (out / "summary.json").write_text(json.dumps(summary, indent=2))
    return summary


def parse_sweep_param(spec: str) -> tuple:
    """"k=2..10" -> ("k", [2..10]); "k=2,4,8" -> explicit list."""
    if "=" not in spec:
        raise ExperimentError(f"bad sweep spec '{spec}'")
    name, _, values = spec.partition("=")
    name = name.strip()
    values = values.strip()
    if ".." in values:
        lo, _, hi = values.partition("..")
        return name, list(range(int(lo), int(hi) + 1))
    return name, [int(v) for v in values.split(",")]


def sweep(config: RunConfig, param_spec: str, out_dir: Optional[str] = None) -> dict:
    name, values = parse_sweep_param(param_spec)
    if name != "k":
        raise ExperimentError(f"unsupported sweep parameter '{name}'")
    out = Path(out_dir or config.out_dir or "runs/sweep")
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for value in values:
        sub = RunConfig(**{**config.__dict__, "k": value, "out_dir": None})
        result = run_experiment(sub, out_dir=str(out / f"k_{value}"))
        rows.append(
            {
                "k": value,
                "mean_cost": {
                    variant: block["mean_cost"]
                    for variant, block in result["variants"].items()
                },
            }
        )
    table = {"param": name, "values": rows}
    (out / "sweep.json").write_text(json.dumps(table, indent=2))
    return table
