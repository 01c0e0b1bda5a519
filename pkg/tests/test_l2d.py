import numpy as np
import pytest

from instructmpc.l2d import (
    AffineMixer,
    LibraryError,
    SoftmaxScorer,
    Vocabulary,
    featurize,
    load_library,
    predict_window,
    prediction_jacobian,
    register_trajectory_generator,
    scenario_decay_vectors,
)
from instructmpc.control import solve_dare, SystemModel

VOCAB = Vocabulary(["wind", "calm", "north"])


def small_library(w_bound=10.0):
    return load_library(
        {
            "n": 2,
            "scenarios": [
                {
                    "id": "flat",
                    "label": "no disturbance",
                    "keywords": ["calm"],
                    "trajectory": {"kind": "constant", "value": [0.0, 0.0]},
                },
                {
                    "id": "push",
                    "label": "constant push",
                    "keywords": ["wind"],
                    "trajectory": {"kind": "constant", "value": [1.0, -2.0]},
                },
                {
                    "id": "wave",
                    "label": "alternating push",
                    "keywords": ["north"],
                    "trajectory": {
                        "kind": "table",
                        "rows": [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]],
                    },
                },
            ],
        },
        w_bound=w_bound,
    )


class TestFeaturize:
    def test_empty_text_is_bias_only(self):
        feats = featurize("", VOCAB)
        expected = np.zeros(4)
        expected[-1] = 1.0
        assert np.array_equal(feats.phi, expected)

    def test_single_keyword_two_coordinates(self):
        feats = featurize("strong WIND ahead", VOCAB)
        assert np.count_nonzero(feats.phi) == 2
        assert np.linalg.norm(feats.phi) == pytest.approx(1.0, abs=1e-12)

    def test_fixture_sentence(self):
        # hand computation: wind + north + bias -> three ones / sqrt(3)
        feats = featurize("wind from the north", VOCAB)
        expected = np.array([1.0, 0.0, 1.0, 1.0]) / np.sqrt(3.0)
        assert np.allclose(feats.phi, expected, atol=1e-12)

    def test_unknown_words_ignored_and_deterministic(self):
        a = featurize("xyzzy calm", VOCAB)
        b = featurize("calm blorp", VOCAB)
        assert np.array_equal(a.phi, b.phi)
        assert np.linalg.norm(a.phi) <= 1.0 + 1e-12


class TestLibrary:
    def test_kinds_and_lookup(self):
        lib = small_library()
        assert lib.count == 3
        assert np.allclose(lib.bank(1, 0, 3), [[1, -2]] * 3)
        assert np.allclose(lib.bank(2, 0, 4)[:, 0], [1, 0, -1, 1])
        assert lib.index_of("wave") == 2
        with pytest.raises(LibraryError):
            lib.index_of("nope")

    def test_clipping_applies_at_bound(self):
        lib = small_library(w_bound=1.0)
        rows = lib.bank(1, 0, 2)
        assert np.all(np.linalg.norm(rows, axis=1) <= 1.0 + 1e-12)

    def test_duplicate_ids_rejected(self):
        doc = {
            "n": 1,
            "scenarios": [
                {"id": "a", "trajectory": {"kind": "constant", "value": [0.0]}},
                {"id": "a", "trajectory": {"kind": "constant", "value": [1.0]}},
            ],
        }
        with pytest.raises(LibraryError):
            load_library(doc, w_bound=1.0)

    def test_procedural_generator(self):
        register_trajectory_generator(
            "ramp", lambda params, n: lambda t: np.full(n, params["slope"] * t)
        )
        doc = {
            "n": 2,
            "scenarios": [
                {
                    "id": "r",
                    "trajectory": {
                        "kind": "procedural",
                        "name": "ramp",
                        "params": {"slope": 0.5},
                    },
                }
            ],
        }
        lib = load_library(doc, w_bound=100.0)
        assert np.allclose(lib.bank(0, 2, 3), [[1, 1], [1.5, 1.5], [2, 2]])


class TestWeights:
    def test_affine_zero_theta_returns_base(self):
        lib = small_library()
        mixer = AffineMixer(
            theta=np.zeros((3, 4)),
            base=np.array([0.2, 0.3, 0.5]),
            center=np.zeros((3, 4)),
            diameter=2.0,
        )
        feats = featurize("wind", VOCAB)
        assert np.allclose(mixer.weights(feats), [0.2, 0.3, 0.5])

    def test_affine_linearity_in_theta(self):
        rng = np.random.default_rng(0)
        mixer = AffineMixer(
            theta=np.zeros((3, 4)), base=rng.uniform(size=3),
            center=np.zeros((3, 4)), diameter=2.0,
        )
        feats = featurize("calm north", VOCAB)
        t1, t2 = rng.uniform(-1, 1, (3, 4)), rng.uniform(-1, 1, (3, 4))
        alpha = 0.37
        mix = mixer.weights(feats, theta=alpha * t1 + (1 - alpha) * t2)
        combo = alpha * mixer.weights(feats, theta=t1) + (1 - alpha) * mixer.weights(
            feats, theta=t2
        )
        assert np.allclose(mix, combo, atol=1e-12)

    def test_affine_fixture_product(self):
        theta = np.array([[1.0, 0.0, 0.0, 2.0], [0.0, 1.0, 0.0, 0.0]])
        mixer = AffineMixer(
            theta=theta, base=np.array([0.5, -0.5]),
            center=np.zeros((2, 4)), diameter=4.0,
        )
        feats = featurize("wind", VOCAB)  # phi = (1,0,0,1)/sqrt2
        s2 = np.sqrt(2.0)
        assert np.allclose(mixer.weights(feats), [0.5 + 3.0 / s2, -0.5])

    def test_softmax_uniform_for_equal_scores(self):
        scorer = SoftmaxScorer(np.zeros((4, 4)))
        feats = featurize("anything", VOCAB)
        assert np.allclose(scorer.weights(feats), 0.25)

    def test_softmax_log_two_ratio(self):
        # scores (ln 2, 0) -> weights (2/3, 1/3)
        scorer = SoftmaxScorer(np.array([[0.0, 0.0, 0.0, np.log(2.0)], [0.0] * 4]))
        feats = featurize("", VOCAB)  # phi = bias only
        assert np.allclose(scorer.weights(feats), [2.0 / 3.0, 1.0 / 3.0], atol=1e-12)

    def test_softmax_simplex_property(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            scorer = SoftmaxScorer(rng.uniform(-50, 50, (5, 4)))
            feats = featurize("wind calm north", VOCAB)
            w = scorer.weights(feats)
            assert abs(w.sum() - 1.0) <= 1e-9
            assert (w >= 0).all()


class TestPredictWindow:
    def test_one_hot_reproduces_bank(self):
        lib = small_library()
        win = predict_window(np.array([0.0, 1.0, 0.0]), lib, t=2, k=3, t_end=10)
        assert np.allclose(win.what, lib.bank(1, 2, 3))

    def test_uniform_mean_of_two(self):
        lib = small_library()
        win = predict_window(np.array([0.5, 0.5, 0.0]), lib, t=0, k=2, t_end=10)
        mean = 0.5 * (lib.bank(0, 0, 2) + lib.bank(1, 0, 2))
        assert np.allclose(win.what, mean)

    def test_fixture_mixture(self):
        lib = small_library()
        win = predict_window(np.array([0.25, 0.75, 0.0]), lib, t=0, k=1, t_end=10)
        assert np.allclose(win.what, [[0.75, -1.5]])

    def test_linearity_superposition(self):
        lib = small_library()
        rng = np.random.default_rng(4)
        w1, w2 = rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3)
        a = predict_window(w1, lib, 1, 4, 20).what
        b = predict_window(w2, lib, 1, 4, 20).what
        ab = predict_window(0.5 * (w1 + w2), lib, 1, 4, 20).what
        assert np.allclose(ab, 0.5 * (a + b), atol=1e-12)

    def test_truncation_at_horizon_end(self):
        lib = small_library()
        win = predict_window(np.ones(3) / 3, lib, t=8, k=5, t_end=10)
        assert win.length == 2
        assert win.t_cal == 9

    def test_bound_flagging(self):
        lib = small_library(w_bound=1.0)
        win = predict_window(np.array([0.0, 5.0, 0.0]), lib, 0, 1, 10)
        assert win.exceeds_bound


class TestJacobian:
    def test_matches_finite_differences(self):
        lib = small_library()
        mixer = AffineMixer(
            theta=np.zeros((3, 4)), base=np.full(3, 1 / 3),
            center=np.zeros((3, 4)), diameter=2.0,
        )
        feats = featurize("wind north", VOCAB)
        t, k, t_end = 1, 3, 20
        jac = prediction_jacobian(mixer, feats, lib, t, k, t_end)
        h = 1e-6
        rng = np.random.default_rng(9)
        theta0 = rng.uniform(-1, 1, (3, 4))
        for _ in range(10):
            idx = (rng.integers(0, 3), rng.integers(0, 4))
            bump = np.zeros((3, 4))
            bump[idx] = h
            up = predict_window(mixer.weights(feats, theta0 + bump), lib, t, k, t_end)
            dn = predict_window(mixer.weights(feats, theta0 - bump), lib, t, k, t_end)
            fd = (up.what - dn.what).reshape(-1) / (2 * h)
            col = jac[:, idx[0] * 4 + idx[1]]
            assert np.allclose(fd, col, rtol=1e-6, atol=1e-9)

    def test_theta_invariance(self):
        lib = small_library()
        mixer = AffineMixer(
            theta=np.ones((3, 4)), base=np.zeros(3),
            center=np.zeros((3, 4)), diameter=10.0,
        )
        feats = featurize("calm", VOCAB)
        j1 = prediction_jacobian(mixer, feats, lib, 0, 2, 10)
        mixer.theta = -3.0 * np.ones((3, 4))
        j2 = prediction_jacobian(mixer, feats, lib, 0, 2, 10)
        assert np.array_equal(j1, j2)

    def test_operator_norm_dominated_by_library_bound(self):
        # submultiplicative bound: ||J|| <= ||phi|| * sqrt(S) * max_s ||bank_s||_F
        lib = small_library()
        mixer = AffineMixer(
            theta=np.zeros((3, 4)), base=np.zeros(3),
            center=np.zeros((3, 4)), diameter=2.0,
        )
        feats = featurize("wind calm", VOCAB)
        t, k, t_end = 0, 4, 20
        jac = prediction_jacobian(mixer, feats, lib, t, k, t_end)
        max_bank = max(
            np.linalg.norm(lib.bank(i, t, k)) for i in range(lib.count)
        )
        bound = np.linalg.norm(feats.phi) * np.sqrt(lib.count) * max_bank
        assert np.linalg.norm(jac, 2) <= bound + 1e-12

    def test_affine_composite_secant(self):
        lib = small_library()
        mixer = AffineMixer(
            theta=np.zeros((3, 4)), base=np.full(3, 0.2),
            center=np.zeros((3, 4)), diameter=2.0,
        )
        feats = featurize("north", VOCAB)
        rng = np.random.default_rng(12)
        t1, t2 = rng.uniform(-1, 1, (3, 4)), rng.uniform(-1, 1, (3, 4))
        mid = predict_window(mixer.weights(feats, 0.5 * (t1 + t2)), lib, 0, 3, 10).what
        avg = 0.5 * (
            predict_window(mixer.weights(feats, t1), lib, 0, 3, 10).what
            + predict_window(mixer.weights(feats, t2), lib, 0, 3, 10).what
        )
        assert np.allclose(mid, avg, atol=1e-10)


def test_scenario_decay_vectors_against_direct_sum():
    lib = small_library()
    model = SystemModel(
        a=[[0.5, 0.1], [0.0, 0.4]], b=np.eye(2), q=np.eye(2), r=np.eye(2), w_bound=10.0
    )
    sol = solve_dare(model)
    t, k, t_end = 1, 3, 10
    vecs = scenario_decay_vectors(sol, lib, t, k, t_end)
    for s in range(lib.count):
        bank = lib.bank(s, t, 3)
        direct = sum(sol.ftp(j) @ bank[j] for j in range(3))
        assert np.allclose(vecs[s], direct, atol=1e-12)
