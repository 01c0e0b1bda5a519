"""Closed-loop episode execution.

One runner drives every preset: fetch context (instruction overrides take
priority), featurize, produce scenario weights per the configured model,
assemble the forecast window, apply the closed-form action (clamped where
the plant demands it), step the environment, reveal the disturbance, and
feed the learning path. Variants: "classic" zeroes the forecast, "untuned"
freezes the model, "tuned" learns.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from ..control import EpisodeTrace, RiccatiSolution, evaluate_cost, mpc_action
from ..control.mpc import cost_gap_psi
from ..l2d.features import ContextFeatures, Vocabulary, featurize
from ..l2d.library import ScenarioLibrary
from ..l2d.models import AffineMixer, SoftmaxScorer, predict_window, window_span
from ..tuner.loss import LossWindow, make_window
from ..tuner.ogd import DelayedGradientTuner
from ..tuner.preferences import PreferenceDataset, build_preferences, dpo_update

VARIANTS = ("classic", "untuned", "tuned")


@dataclass
class ExogenousEnv:
    """Linear plant with a pre-drawn disturbance sequence."""

    a: np.ndarray
    b: np.ndarray
    w: np.ndarray
    contexts: List[str]
    x0: np.ndarray

    @property
    def t_len(self) -> int:
        return self.w.shape[0]

    def step(self, t: int, x: np.ndarray, u: np.ndarray) -> tuple:
        x_next = self.a @ x + self.b @ u + self.w[t]
        return x_next, self.w[t], u, {}


@dataclass
class PresetSetup:
    """Everything an episode needs besides the seed and the variant."""

    name: str
    sol: RiccatiSolution
    lib: ScenarioLibrary
    vocab: Vocabulary
    k: int
    make_env: Callable[[object], object]      # seed -> env adapter
    predictor_kind: str                        # affine | softmax | external
    tuner_kind: str                            # tailored-ogd | dpo | frozen
    theta0: Optional[np.ndarray] = None
    base_weights: Optional[np.ndarray] = None
    center: Optional[np.ndarray] = None
    diameter: float = 4.0
    grad_bound: object = "estimate"            # float or "estimate"
    grad_bound_inflation: float = 1.5
    projection: bool = True
    scorer0: Optional[np.ndarray] = None
    dpo_beta: float = 1.0
    dpo_step: float = 20.0
    preference_threshold: int = 240
    continual: bool = False
    input_clamp: Optional[tuple] = None
    external_cmd: Optional[str] = None
    external_client_factory: Optional[Callable] = None


@dataclass
class EpisodeResult:
    variant: str
    seed: object
    trace: EpisodeTrace
    cost: float
    feats: List[ContextFeatures]
    thetas: List[np.ndarray]
    weights_series: np.ndarray
    eta_series: np.ndarray
    loss_series: np.ndarray
    theta_norms: np.ndarray
    psi_norms: np.ndarray
    grad_bound: float
    model_state: Dict[str, np.ndarray]
    preferences: list
    extras: Dict[str, np.ndarray]
    instruction_log: List[tuple]
    dpo_events: list = field(default_factory=list)

    @property
    def total_extra(self) -> Dict[str, float]:
        return {key: float(val.sum()) for key, val in self.extras.items()}


class _DpoState:
    """Preference collection plus threshold-triggered scorer updates."""

    def __init__(self, setup: PresetSetup, scorer_mat: np.ndarray, ref_mat: np.ndarray):
        self.scorer = SoftmaxScorer(scorer_mat.copy())
        self.reference = SoftmaxScorer(ref_mat.copy())
        self.dataset = PreferenceDataset(threshold=setup.preference_threshold)
        self.beta = setup.dpo_beta
        self.step_size = setup.dpo_step
        self.last_loss = 0.0
        self.events: list = []
        self.all_items: list = []

    def consume(self, window: LossWindow, lib: ScenarioLibrary, t_now: int) -> None:
        items = build_preferences(window, lib)
        self.dataset.extend(items)
        self.all_items.extend(items)
        if self.dataset.ready:
            batch = self.dataset.take_batch()
            self.scorer, before, after = dpo_update(
                self.scorer, self.reference, batch, lib, self.beta, self.step_size
            )
            self.last_loss = after
            self.events.append(
                {"t": t_now, "batch": len(batch), "loss_before": before, "loss_after": after}
            )


class EpisodeRunner:
    def __init__(
        self,
        setup: PresetSetup,
        variant: str,
        seed,
        model_state: Optional[Dict[str, np.ndarray]] = None,
        overrides: Optional[Dict[int, str]] = None,
    ):
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant '{variant}'")
        self.setup = setup
        self.variant = variant
        self.seed = seed
        self.overrides = dict(overrides or {})
        self.env = setup.make_env(seed)
        self.t_len = self.env.t_len
        self.sol = setup.sol
        self.lib = setup.lib
        self.k = setup.k
        self.t = 0
        self.x = np.asarray(self.env.x0, dtype=float).copy()
        self.cum_cost = 0.0
        self.instruction_log: List[tuple] = []
        state = model_state or {}

        n, m = self.sol.model.n, self.sol.model.m
        self._x_rows = np.zeros((self.t_len + 1, n))
        self._x_rows[0] = self.x
        self._u_rows = np.zeros((self.t_len, m))
        self._w_rows = np.zeros((self.t_len, n))
        self._windows: List[np.ndarray] = []
        self._stage = np.zeros(self.t_len)
        self._ids: List[str] = []
        self._feats: List[ContextFeatures] = []
        self._thetas: List[np.ndarray] = []
        self._weights = np.zeros((self.t_len, self.lib.count))
        self._eta = np.zeros(self.t_len)
        self._loss = np.zeros(self.t_len)
        self._tnorm = np.zeros(self.t_len)
        self._extras: Dict[str, list] = {}

        self.grad_bound_value = float("nan")
        self.tuner: Optional[DelayedGradientTuner] = None
        self.mixer: Optional[AffineMixer] = None
        self.scorer: Optional[SoftmaxScorer] = None
        self.dpo: Optional[_DpoState] = None
        self.client = None
        self._book: Dict[int, LossWindow] = {}

        if setup.predictor_kind == "affine":
            theta0 = state.get("theta", setup.theta0)
            self.mixer = AffineMixer(
                theta=np.array(theta0, dtype=float),
                base=np.array(setup.base_weights, dtype=float),
                center=np.array(setup.center, dtype=float),
                diameter=setup.diameter,
            )
            if variant == "tuned" and setup.tuner_kind == "tailored-ogd":
                self.grad_bound_value = self._resolve_grad_bound()
                self.tuner = DelayedGradientTuner(
                    mixer=self.mixer,
                    sol=self.sol,
                    lib=self.lib,
                    k=self.k,
                    t_end=self.t_len,
                    grad_bound=self.grad_bound_value,
                    projection=setup.projection,
                )
        elif setup.predictor_kind == "softmax":
            mat = state.get("scorer", setup.scorer0)
            ref = state.get("scorer_ref", setup.scorer0)
            self.scorer = SoftmaxScorer(np.array(mat, dtype=float))
            if variant == "tuned" and setup.tuner_kind == "dpo":
                self.dpo = _DpoState(setup, self.scorer.weights_matrix, np.array(ref))
                self.scorer = self.dpo.scorer
        elif setup.predictor_kind == "external":
            factory = setup.external_client_factory
            if factory is None:
                from ..l2d.adapter_client import ExternalPredictorClient

                factory = lambda: ExternalPredictorClient(  # noqa: E731
                    setup.external_cmd, self.lib.ids, self.k
                )
            self.client = factory()
            self.client.handshake()
        else:
            raise ValueError(f"unknown predictor kind '{setup.predictor_kind}'")

    def _resolve_grad_bound(self) -> float:
        if self.setup.grad_bound != "estimate":
            return float(self.setup.grad_bound)
        from ..analysis.bounds import estimate_grad_bound

        # disturbances are exogenous, so the windows the estimate ranges
        # over do not depend on the parameter path
        if not isinstance(self.env, ExogenousEnv):
            raise ValueError("gradient-bound estimation needs an exogenous plant")
        phis = np.array(
            [featurize(self._context(t), self.setup.vocab).phi for t in range(self.t_len)]
        )
        return estimate_grad_bound(
            self.sol, self.lib, phis, self.env.w,
            np.array(self.setup.base_weights, dtype=float),
            np.array(self.setup.center, dtype=float),
            self.setup.diameter, self.k,
            inflation=self.setup.grad_bound_inflation,
        )

    def _context(self, t: int) -> str:
        return self.overrides.get(t, self.env.contexts[t])

    def inject_instruction(self, t: int, text: str) -> None:
        if t < self.t:
            raise ValueError("cannot rewrite a step that already ran")
        self.overrides[t] = text

    def _weights_for(self, t: int, feats: ContextFeatures) -> np.ndarray:
        if self.variant == "classic":
            return np.zeros(self.lib.count)
        if self.mixer is not None:
            return self.mixer.weights(feats)
        if self.scorer is not None:
            return self.scorer.weights(feats)
        try:
            return self.client.predict(t, feats.context_id)
        except Exception:
            import logging

            logging.getLogger(__name__).warning(
                "external predictor failed at t=%d; falling back to uniform", t
            )
            return np.full(self.lib.count, 1.0 / self.lib.count)

    def step(self) -> dict:
        t = self.t
        if t >= self.t_len:
            raise RuntimeError("episode already finished")
        text = self._context(t)
        if t in self.overrides:
            self.instruction_log.append((t, text))
        feats = featurize(text, self.setup.vocab)
        self._feats.append(feats)

        if self.tuner is not None:
            self.tuner.begin_step(t, feats)
        elif self.dpo is not None:
            self._book[t] = make_window(t, self.k, self.t_len, feats, self.sol, self.lib)

        theta_now = (
            self.mixer.theta.copy() if self.mixer is not None
            else (self.scorer.weights_matrix.copy() if self.scorer is not None else np.zeros(1))
        )
        self._thetas.append(theta_now)

        weights = self._weights_for(t, feats)
        self._weights[t] = weights
        length = window_span(t, self.k, self.t_len)
        if self.variant == "classic":
            what = np.zeros((length, self.sol.model.n))
        else:
            what = predict_window(weights, self.lib, t, self.k, self.t_len).what
        self._windows.append(what)

        u_cmd = mpc_action(self.sol, self.x, what)
        if self.setup.input_clamp is not None:
            u_cmd = np.clip(u_cmd, *self.setup.input_clamp)
        x_next, w_row, u_applied, extras = self.env.step(t, self.x, u_cmd)

        stage = self.x @ self.sol.model.q @ self.x + u_applied @ self.sol.model.r @ u_applied
        self._stage[t] = stage
        self.cum_cost += stage
        self._u_rows[t] = u_applied
        self._w_rows[t] = w_row
        self._x_rows[t + 1] = x_next
        self._ids.append(feats.context_id)
        for key, val in extras.items():
            self._extras.setdefault(key, []).append(val)

        # reveal w_t to the learning path
        if self.tuner is not None:
            self.tuner.observe(t, w_row)
            self.tuner.ogd_step(t)
            self._eta[t] = self.tuner.last_eta
            self._loss[t] = self.tuner.last_loss
            self._tnorm[t] = float(np.linalg.norm(self.mixer.theta))
        else:
            for start, book_win in list(self._book.items()):
                if start <= t <= book_win.t_cal:
                    book_win.observe(w_row)
                if book_win.complete:
                    self.dpo.consume(book_win, self.lib, t)
                    self.scorer = self.dpo.scorer
                    del self._book[start]
            self._loss[t] = self.dpo.last_loss if self.dpo is not None else 0.0
            self._tnorm[t] = float(np.linalg.norm(theta_now))

        self.x = x_next
        self.t += 1
        return {
            "t": t,
            "x": self._x_rows[t].tolist(),
            "u": u_applied.tolist(),
            "w": w_row.tolist(),
            "w_hat": what.tolist(),
            "weights": {sid: float(weights[i]) for i, sid in enumerate(self.lib.ids)},
            "stage_cost": float(stage),
            "cum_cost": float(self.cum_cost),
            "eta": float(self._eta[t]),
            "theta_norm": float(self._tnorm[t]),
            "context_id": text,
            **{k: (float(v) if np.isscalar(v) else v) for k, v in extras.items()},
        }

    @property
    def finished(self) -> bool:
        return self.t >= self.t_len

    def finalize(self) -> EpisodeResult:
        if not self.finished:
            raise RuntimeError("episode still in progress")
        trace = EpisodeTrace(
            x=self._x_rows, u=self._u_rows, w=self._w_rows,
            windows=self._windows, stage_costs=self._stage,
            context_ids=self._ids, k=self.k,
        )
        cost = evaluate_cost(trace, self.sol)
        psi, _ = cost_gap_psi(self.sol, self._windows, self._w_rows)
        if self.client is not None:
            self.client.shutdown()
        model_state: Dict[str, np.ndarray] = {}
        if self.mixer is not None:
            model_state["theta"] = self.mixer.theta.copy()
        if self.scorer is not None:
            model_state["scorer"] = self.scorer.weights_matrix.copy()
            if self.dpo is not None:
                model_state["scorer_ref"] = self.dpo.reference.weights_matrix.copy()
        return EpisodeResult(
            variant=self.variant,
            seed=self.seed,
            trace=trace,
            cost=cost,
            feats=self._feats,
            thetas=self._thetas,
            weights_series=self._weights,
            eta_series=self._eta,
            loss_series=self._loss,
            theta_norms=self._tnorm,
            psi_norms=np.linalg.norm(psi, axis=1),
            grad_bound=self.grad_bound_value,
            model_state=model_state,
            preferences=self.dpo.all_items if self.dpo is not None else [],
            extras={k: np.array(v) for k, v in self._extras.items()},
            instruction_log=list(self.instruction_log),
            dpo_events=self.dpo.events if self.dpo is not None else [],
        )


def make_runner(
    setup: PresetSetup,
    variant: str,
    seed,
    model_state: Optional[dict] = None,
    overrides: Optional[Dict[int, str]] = None,
) -> EpisodeRunner:
    return EpisodeRunner(setup, variant, seed, model_state, overrides)


def run_episode(
    setup: PresetSetup,
    variant: str,
    seed,
    model_state: Optional[dict] = None,
    overrides: Optional[Dict[int, str]] = None,
) -> EpisodeResult:
    runner = make_runner(setup, variant, seed, model_state, overrides)
    while not runner.finished:
        runner.step()
    return runner.finalize()


def trace_digest(result: EpisodeResult) -> str:
    """Stable content hash of the numeric trace for determinism checks."""
    hasher = hashlib.sha256()
    for arr in (result.trace.x, result.trace.u, result.trace.w, result.trace.stage_costs):
        hasher.update(np.ascontiguousarray(arr).tobytes())
    hasher.update("\x1f".join(result.trace.context_ids).encode())
    return hasher.hexdigest()
