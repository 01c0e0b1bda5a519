import math

import numpy as np
import pytest

from instructmpc.sims import (
    ContextStream,
    EnergyParams,
    astroid_target,
    energy_price,
    energy_step,
    make_robot_system,
    robot_disturbance,
    run_episode,
)
from instructmpc.sims.energy import (
    EnergyConfigError,
    build_energy_env,
    energy_library,
    make_energy_system,
    soc_reference,
)
from instructmpc.sims.episode import trace_digest
from instructmpc.sims.presets import energy_setup, robot_setup, theory_setup
from instructmpc.sims.robot import (
    RobotParams,
    build_robot_episode,
    disturbance_bound,
    robot_library,
)
from instructmpc.sims.theory import TheoryParams, build_theory_episode, make_theory_system


class TestAstroid:
    def test_start_at_top(self):
        assert np.allclose(astroid_target(0), [0.0, 2.0])

    def test_quarter_period(self):
        t = 38.2 * math.pi / 2
        assert np.allclose(astroid_target(t), [2.0, 0.0], atol=1e-9)

    def test_bounded_by_scale(self):
        for t in range(0, 500, 7):
            assert np.abs(astroid_target(t)).max() <= 2.0 + 1e-12

    def test_periodicity(self):
        # exact period is 2*pi*38.2 (not an integer); at the rounded period
        # the sampling phase slips by |240 - 2*pi*38.2| / 38.2 ~ 4.6e-4 rad
        exact = 2 * math.pi * 38.2
        for t in (0, 13, 57):
            assert np.linalg.norm(
                astroid_target(t) - astroid_target(t + exact)
            ) <= 1e-9
            assert np.linalg.norm(
                astroid_target(t) - astroid_target(t + round(exact))
            ) <= 2e-3


class TestRobotSystem:
    def test_matrices_match_printed_values(self):
        model, sol = make_robot_system()
        c = 0.2
        assert np.array_equal(
            model.a,
            [[1, 0, c, 0], [0, 1, 0, c], [0, 0, 1, 0], [0, 0, 0, 1]],
        )
        assert np.array_equal(model.b, [[0, 0], [0, 0], [c, 0], [0, c]])
        assert np.array_equal(model.q, np.diag([1.0, 1.0, 0.0, 0.0]))
        assert np.array_equal(model.r, 0.01 * np.eye(2))
        assert sol.rho_f < 1.0
        from instructmpc.control.riccati import dare_residual

        assert dare_residual(model, sol.p) <= 1e-10

    def test_disturbance_composition(self):
        y0, y1 = astroid_target(3), astroid_target(4)
        w = robot_disturbance(3, y0, y1, np.array([10.0, -5.0]))
        assert np.allclose(w[:2], y0 - y1)
        assert np.allclose(w[2:], [-2.0, 1.0])

    def test_wind_ranges(self):
        params = RobotParams()
        episode = build_robot_episode(params, seed=0)
        for t in range(params.t_len):
            drift = np.array([
                *(astroid_target(t) - astroid_target(t + 1)), 0.0, 0.0,
            ])
            wind = episode.w[t] - drift
            limit = 9.0 if t in params.gust_steps else 0.4
            assert np.abs(wind[2:]).max() <= limit + 1e-12
            assert np.allclose(wind[:2], 0.0)

    def test_disturbance_norm_bound(self):
        params = RobotParams()
        bound = disturbance_bound(params)
        for seed in range(5):
            episode = build_robot_episode(params, seed)
            assert np.linalg.norm(episode.w, axis=1).max() <= bound + 1e-9

    def test_context_stream_warns_ahead(self):
        params = RobotParams()
        episode = build_robot_episode(params, seed=4)
        for t_gust, quadrant in episode.quadrants.items():
            for t in range(max(0, t_gust - params.lead), t_gust + 1):
                assert quadrant in episode.contexts[t]
        assert episode.contexts[5].startswith("conditions calm")

    def test_stream_determinism(self):
        a = build_robot_episode(RobotParams(), seed=7)
        b = build_robot_episode(RobotParams(), seed=7)
        assert a.contexts == b.contexts and np.array_equal(a.w, b.w)

    def test_blind_announcements(self):
        params = RobotParams(announce_direction=False)
        episode = build_robot_episode(params, seed=0)
        warned = [c for c in episode.contexts if "wind" in c]
        assert warned and all("direction unknown" in c for c in warned)

    def test_library_rows_within_bound(self):
        params = RobotParams()
        lib = robot_library(params)
        for i in range(lib.count):
            bank = lib.bank(i, 15, 30)
            assert np.linalg.norm(bank, axis=1).max() <= lib.w_bound + 1e-12


class TestContextStream:
    def test_expansion_and_priority(self):
        stream = ContextStream(
            events=[(4, "early", "a"), (6, "late", "b")], lead=2, default_text="calm"
        )
        texts = stream.expand(9)
        assert texts[:2] == ["calm", "calm"]
        assert texts[2:5] == ["early", "early", "late"]  # overlap: later event wins
        assert texts[5:7] == ["late", "late"]
        assert texts[7:] == ["calm", "calm"]

    def test_unsorted_events_rejected(self):
        with pytest.raises(ValueError):
            ContextStream(events=[(5, "b", ""), (1, "a", "")], lead=1, default_text="")


class TestEnergy:
    def test_step_idle(self):
        params = EnergyParams()
        x, grid = energy_step(0.5, 0.0, 0.0, 0.0, params)
        assert x == 0.5 and grid == 0.0

    def test_step_charging_from_empty(self):
        params = EnergyParams(e_cap=10.0, p_max=10.0, eta_c=0.9)
        x, grid = energy_step(0.0, 1.0, 0.0, 0.0, params)
        assert x == pytest.approx(0.9)
        assert grid == pytest.approx(10.0)

    def test_step_full_battery_huge_load(self):
        params = EnergyParams(e_cap=10.0)
        x, grid = energy_step(1.0, 0.0, 25.0, 0.0, params)
        assert x == 0.0
        assert grid == pytest.approx(25.0 - 10.0)

    def test_price_lookup_and_cost(self):
        params = EnergyParams()
        assert energy_price(3, params) == 0.2
        assert energy_price(19, params) == 1.0
        from instructmpc.sims.energy import piecewise_cost

        assert piecewise_cost(2.0, 0.3) == pytest.approx(0.6)
        assert piecewise_cost(0.0, 1.0) == 0.0

    def test_price_band_validation(self):
        bad = EnergyParams(price_bands=((0, 8, 0.2), (9, 24, 0.5)))
        with pytest.raises(EnergyConfigError):
            bad.validate()

    def test_demand_draws_within_unit_range(self):
        params = EnergyParams(days=3, surge_probs=(1.0, 0.0, 0.0))
        env = build_energy_env(params, seed=0)
        assert env.loads.min() >= 0.5 - 1e-12
        assert env.loads.max() <= 2.5 + 1e-12

    def test_soc_stays_in_unit_interval(self):
        setup = energy_setup(days=10)
        for variant in ("classic", "tuned"):
            res = run_episode(setup, variant, 0)
            soc = res.extras["soc"]
            assert soc.min() >= 0.0 and soc.max() <= 1.0

    def test_effective_disturbance_recursion_exact(self):
        setup = energy_setup(days=5)
        res = run_episode(setup, "untuned", 1)
        res.trace.validate(setup.sol.model)

    def test_library_tables_have_day_period(self):
        lib = energy_library(EnergyParams())
        a = lib.bank(0, 0, 24)
        b = lib.bank(0, 24, 24)
        assert np.array_equal(a, b)


class TestTheory:
    def test_plant_contracts_in_operator_norm(self):
        _, sol = make_theory_system()
        assert sol.norm_f < 1.0
        assert sol.rho_f < 1.0

    def test_regimes_announced_consistently(self):
        params = TheoryParams(t_len=120)
        episode = build_theory_episode(params, seed=2)
        for t in range(params.t_len):
            wind = episode.w[t]
            text = episode.contexts[t]
            if "north" in text:
                assert wind[1] > 0.5
            elif "calm" in text:
                assert np.abs(wind).max() <= params.noise + 1e-12

    def test_disturbances_within_bound(self):
        params = TheoryParams(t_len=300)
        from instructmpc.sims.theory import disturbance_bound as theory_bound

        episode = build_theory_episode(params, seed=3)
        assert np.linalg.norm(episode.w, axis=1).max() <= theory_bound(params)


class TestEpisodes:
    def test_classic_zero_disturbance_zero_cost(self):
        # theory plant from the origin with no wind stays at the origin
        setup = theory_setup(t_len=50)
        env = setup.make_env(0)
        env.w[:] = 0.0
        setup.make_env = lambda seed: env
        res = run_episode(setup, "classic", 0)
        assert res.cost == pytest.approx(0.0, abs=1e-18)

    def test_same_seed_identical_digest(self):
        setup = robot_setup()
        a = run_episode(setup, "untuned", 3)
        b = run_episode(setup, "untuned", 3)
        assert trace_digest(a) == trace_digest(b)

    def test_variant_ordering_on_mean(self):
        setup = robot_setup()
        seeds = range(6)
        classic = np.mean([run_episode(setup, "classic", s).cost for s in seeds])
        state = None
        tuned = []
        for s in seeds:
            r = run_episode(setup, "tuned", s, model_state=state)
            state = r.model_state
            tuned.append(r.cost)
        assert np.mean(tuned) < classic

    def test_transitions_satisfy_recursion(self):
        setup = theory_setup(t_len=80)
        res = run_episode(setup, "tuned", 0)
        res.trace.validate(setup.sol.model)

    def test_instruction_override_recorded(self):
        setup = robot_setup(announce_direction=False)
        res = run_episode(
            setup, "untuned", 0,
            overrides={18: "strong northeast wind expected within 2 steps"},
        )
        assert res.instruction_log == [(18, "strong northeast wind expected within 2 steps")]
        assert res.trace.context_ids[18].startswith("strong northeast")
