"""Battery dispatch under time-of-use prices with synthetic PV and load.

Physical state is the state of charge in [0, 1]; the control is the charge
rate in [0, 1]. The battery auto-discharges to cover net load. The
controller runs on the scalar linearization around a time-of-use reference
schedule: the deviation state obeys x' = x + b u + w with b the normalized
charge gain and w the realized effective disturbance (net drain, clipping
residue and reference drift). The quadratic tracking cost is a proxy; the
reported objective is the actual electricity bill.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from ..control import SystemModel, solve_dare
from ..l2d.features import Vocabulary
from ..l2d.library import ScenarioLibrary, load_library


class EnergyConfigError(Exception):
    pass


DAY_TYPES = ("quiet", "surge_afternoon", "surge_evening")

TEXTS = {
    "overnight": "normal overnight operations",
    "quiet": "normal operations today, no special load expected",
    "surge_afternoon": (
        "heavy compute deadline today, sustained afternoon load expected"
    ),
    "surge_evening": "campus event tonight, extended evening demand expected",
}

KEYWORDS = {
    "quiet": ("normal",),
    "surge_afternoon": ("deadline", "compute", "afternoon"),
    "surge_evening": ("event", "evening", "demand"),
}


@dataclass(frozen=True)
class EnergyParams:
    steps_per_day: int = 24
    days: int = 100
    e_cap: float = 30.0          # kWh
    p_max: float = 10.0          # kW
    eta_c: float = 0.95
    price_bands: tuple = ((0, 8, 0.2), (8, 18, 0.5), (18, 22, 1.0), (22, 24, 0.5))
    pv_peak: float = 6.0         # kW clear-sky midday
    pv_amp_range: tuple = (0.7, 1.0)
    base_task_units: tuple = (1.0, 5.0)   # per-step demand draw, uniform
    unit_kwh: float = 0.5
    surge_probs: tuple = (0.45, 0.2, 0.35)  # quiet / afternoon / evening
    afternoon_hours: tuple = (12, 18)
    afternoon_adder: tuple = (4.0, 6.0)   # kWh per hour, uniform per day
    evening_hours: tuple = (17, 23)
    evening_adder: tuple = (4.5, 6.5)
    announce_hour: int = 6

    @property
    def t_len(self) -> int:
        return self.steps_per_day * self.days

    @property
    def charge_gain(self) -> float:
        return self.eta_c * self.p_max / self.e_cap

    def validate(self) -> None:
        hours = sorted(self.price_bands)
        covered = []
        prev_end = 0
        for start, end, rate in hours:
            if start != prev_end or rate <= 0:
                raise EnergyConfigError("price bands must cover all hours")
            prev_end = end
            covered.append(rate)
        if prev_end != self.steps_per_day:
            raise EnergyConfigError("price bands must cover all hours")
        peak = max(covered)
        valley = min(covered)
        if not peak >= covered[1] >= valley:
            raise EnergyConfigError("rates must order peak >= shoulder >= valley")


def energy_price(hour: int, params: EnergyParams) -> float:
    for start, end, rate in params.price_bands:
        if start <= hour < end:
            return rate
    raise EnergyConfigError(f"hour {hour} not covered by price schedule")


def piecewise_cost(grid_kwh: float, rate: float) -> float:
    return rate * grid_kwh


def energy_step(
    x: float, u: float, load: float, pv: float, params: EnergyParams
) -> Tuple[float, float]:
    """One physical battery step; returns (next SoC, grid purchase in kWh).

    Auto-discharge covers net load up to the stored energy; charging draws
    p_max * u from the mains with efficiency eta_c; SoC is clipped to [0, 1].
    """
    if any(v <= 0 for v in (params.e_cap, params.p_max, params.eta_c)):
        raise EnergyConfigError("capacity, power and efficiency must be positive")
    discharge = min(x * params.e_cap, max(0.0, load - pv))
    charge = params.eta_c * params.p_max * u
    x_next = float(np.clip(x + (charge - discharge) / params.e_cap, 0.0, 1.0))
    grid = max(0.0, load + params.p_max * u - pv - discharge)
    return x_next, grid


def soc_reference(params: EnergyParams) -> np.ndarray:
    """Daily cycle target: fill through the solar window (surplus PV charges
    for free), sit high before the evening peak, drain across it, idle low
    overnight. Headroom above the pre-peak target is what announced surges
    can claim. Hour-indexed array."""
    ref = np.full(params.steps_per_day, 0.25)
    for i, h in enumerate(range(7, 17)):       # solar ramp 0.25 -> 0.85
        ref[h] = 0.25 + (0.85 - 0.25) * (i + 1) / 10.0
    ref[17] = 0.85
    for i, h in enumerate(range(18, 23)):      # drain across the peak
        ref[h] = 0.85 - (0.85 - 0.25) * (i + 1) / 5.0
    return ref


def _pv_profile_shape(params: EnergyParams) -> np.ndarray:
    hours = np.arange(params.steps_per_day)
    shape = np.sin(np.pi * (hours - 6) / 12.0)
    shape[(hours < 6) | (hours >= 18)] = 0.0
    return np.clip(shape, 0.0, None)


def mean_drain_profile(params: EnergyParams) -> np.ndarray:
    """Expected net drain (kWh per hour) on a quiet day."""
    mean_load = params.unit_kwh * sum(params.base_task_units) / 2.0
    mean_amp = params.pv_peak * sum(params.pv_amp_range) / 2.0
    pv = mean_amp * _pv_profile_shape(params)
    return np.clip(mean_load - pv, 0.0, None)


def make_energy_system(params: EnergyParams = EnergyParams()) -> tuple:
    params.validate()
    ref = soc_reference(params)
    drift = ref - np.roll(ref, -1)
    max_drain = (
        params.unit_kwh * params.base_task_units[1] + params.afternoon_adder[1]
    ) / params.e_cap
    bound = float(np.abs(drift).max() + max_drain + 0.05)
    # r sized so the closed-loop decay sits near 0.9: the forecast window
    # then actually reaches the hours between an announcement and its surge
    model = SystemModel(
        a=[[1.0]], b=[[params.charge_gain]], q=[[1.0]], r=[[9.0]], w_bound=bound
    )
    return model, solve_dare(model)


def energy_library(params: EnergyParams = EnergyParams()) -> ScenarioLibrary:
    """Per-day-type effective-disturbance tables (period one day)."""
    ref = soc_reference(params)
    drift = ref - np.roll(ref, -1)      # ref[h] - ref[h+1], wrapped
    quiet = drift - mean_drain_profile(params) / params.e_cap
    rows = {"quiet": quiet.copy()}
    afternoon = quiet.copy()
    lo, hi = params.afternoon_hours
    afternoon[lo:hi] -= (sum(params.afternoon_adder) / 2.0) / params.e_cap
    rows["surge_afternoon"] = afternoon
    evening = quiet.copy()
    lo, hi = params.evening_hours
    evening[lo:hi] -= (sum(params.evening_adder) / 2.0) / params.e_cap
    rows["surge_evening"] = evening
    _, sol = make_energy_system(params)
    scenarios = [
        {
            "id": name,
            "label": TEXTS[name],
            "keywords": list(KEYWORDS[name]),
            "trajectory": {
                "kind": "table",
                "rows": [[float(v)] for v in rows[name]],
                "period": params.steps_per_day,
            },
        }
        for name in DAY_TYPES
    ]
    return load_library(
        {"n": 1, "scenarios": scenarios}, w_bound=sol.model.w_bound
    )


def energy_vocabulary() -> Vocabulary:
    words: List[str] = []
    for kws in KEYWORDS.values():
        words.extend(kws)
    return Vocabulary(words)


@dataclass
class EnergyEnv:
    """Seeded realization of loads, PV and prices for one run."""

    params: EnergyParams
    loads: np.ndarray
    pv: np.ndarray
    rates: np.ndarray
    contexts: List[str]
    day_types: List[str]
    ref: np.ndarray            # per-step reference SoC
    soc0: float = 0.5
    soc: float = field(default=0.5, init=False)
    grid_series: list = field(default_factory=list, init=False)
    cost_series: list = field(default_factory=list, init=False)
    soc_series: list = field(default_factory=list, init=False)

    def __post_init__(self):
        self.soc = self.soc0

    @property
    def t_len(self) -> int:
        return self.params.t_len

    @property
    def x0(self) -> np.ndarray:
        return np.array([self.soc0 - self.ref[0]])

    def step(self, t: int, x_dev: np.ndarray, u: np.ndarray) -> tuple:
        """Apply the clamped charge command; return the deviation transition."""
        u_phys = float(np.clip(u[0], 0.0, 1.0))
        soc_next, grid = energy_step(
            self.soc, u_phys, float(self.loads[t]), float(self.pv[t]), self.params
        )
        cost = piecewise_cost(grid, float(self.rates[t]))
        self.grid_series.append(grid)
        self.cost_series.append(cost)
        self.soc_series.append(soc_next)
        ref_next = self.ref[(t + 1) % len(self.ref)] if t + 1 < self.t_len else self.ref[0]
        x_dev_next = np.array([soc_next - ref_next])
        # effective disturbance makes the linear recursion exact
        w_eff = x_dev_next - x_dev - self.params.charge_gain * np.array([u_phys])
        self.soc = soc_next
        extras = {
            "grid_kwh": grid,
            "price": float(self.rates[t]),
            "electricity_cost": cost,
            "soc": soc_next,
        }
        return x_dev_next, w_eff, np.array([u_phys]), extras


def build_energy_env(params: EnergyParams, seed) -> EnergyEnv:
    params.validate()
    rng = np.random.default_rng(seed)
    t_len = params.t_len
    shape = _pv_profile_shape(params)
    loads = np.zeros(t_len)
    pv = np.zeros(t_len)
    rates = np.zeros(t_len)
    contexts = [""] * t_len
    day_types: List[str] = []
    for day in range(params.days):
        day_type = rng.choice(DAY_TYPES, p=params.surge_probs)
        day_types.append(str(day_type))
        amp = params.pv_peak * rng.uniform(*params.pv_amp_range)
        adder = 0.0
        if day_type == "surge_afternoon":
            adder = rng.uniform(*params.afternoon_adder)
        elif day_type == "surge_evening":
            adder = rng.uniform(*params.evening_adder)
        for h in range(params.steps_per_day):
            t = day * params.steps_per_day + h
            load = params.unit_kwh * rng.uniform(*params.base_task_units)
            if day_type == "surge_afternoon" and params.afternoon_hours[0] <= h < params.afternoon_hours[1]:
                load += adder
            elif day_type == "surge_evening" and params.evening_hours[0] <= h < params.evening_hours[1]:
                load += adder
            loads[t] = load
            pv[t] = amp * shape[h]
            rates[t] = energy_price(h, params)
            if h < params.announce_hour:
                contexts[t] = TEXTS["overnight"]
            else:
                contexts[t] = TEXTS[day_type]
    ref_hours = soc_reference(params)
    ref = np.tile(ref_hours, params.days)
    return EnergyEnv(
        params=params, loads=loads, pv=pv, rates=rates,
        contexts=contexts, day_types=day_types, ref=ref,
    )


def reference_scorer(lib: ScenarioLibrary, vocab: Vocabulary, sharpness: float = 4.0) -> np.ndarray:
    mat = np.zeros((lib.count, vocab.dim))
    kw_index = {kw: i for i, kw in enumerate(vocab.keywords)}
    for name in DAY_TYPES:
        row = lib.index_of(name)
        for kw in KEYWORDS[name]:
            mat[row, kw_index[kw]] = sharpness
    return mat


def reference_theta(lib: ScenarioLibrary, vocab: Vocabulary) -> np.ndarray:
    """Affine map from the first keyword of each day type to its scenario,
    relative to a uniform base."""
    theta = np.zeros((lib.count, vocab.dim))
    kw_index = {kw: i for i, kw in enumerate(vocab.keywords)}
    count = lib.count
    for name in DAY_TYPES:
        phi_nonzero = len(KEYWORDS[name]) + 1   # matched keywords plus bias
        scale = np.sqrt(phi_nonzero)
        lead_kw = kw_index[KEYWORDS[name][0]]
        for other in DAY_TYPES:
            row = lib.index_of(other)
            want = 1.0 if other == name else 0.0
            theta[row, lead_kw] = (want - 1.0 / count) * scale
    return theta
