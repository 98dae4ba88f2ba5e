"""Unit tests for diversity reweighting and generation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CHORD_CYCLE
from textlstm.model import ModelHyper, init_model
from textlstm.nn import SoftmaxLayerParams
from textlstm.sampling import (
    AlphaRegion,
    AlphaSchedule,
    GenerationRequest,
    generate,
    reweight,
    sample_next,
)
from textlstm.vocabulary import OovTokenError, Vocab


def probe_model(probs, tokens=None):
    """A model whose output distribution is `probs` regardless of input.

    All recurrent weights are zero, so the hidden state pins at a constant
    and the softmax bias alone fixes the output distribution.
    """
    probs = np.asarray(probs, dtype=np.float64)
    tokens = tokens or [f"w{i}" for i in range(len(probs))]
    vocab = Vocab.build(" ".join(tokens), "word")
    model = init_model(vocab, ModelHyper(hidden_size=4), precision="float64", rng=0)
    for layer in model.layers:
        layer.w_x[:] = 0.0
        layer.w_h[:] = 0.0
        layer.b[:] = 0.0
    with np.errstate(divide="ignore"):
        bias = np.where(probs > 0, np.log(probs, where=probs > 0), -1e9)
    model.output = SoftmaxLayerParams(np.zeros((4, len(probs))), bias)
    return model


dirichlet_probs = st.integers(0, 2**32 - 1).map(
    lambda seed: np.random.default_rng(seed).dirichlet(np.ones(6))
)


class TestAlphaSchedule:
    def test_region_validation(self):
        with pytest.raises(ValueError, match="exceed"):
            AlphaRegion(4, 4, 1.0)
        with pytest.raises(ValueError, match="alpha"):
            AlphaRegion(0, 4, 0.0)
        with pytest.raises(ValueError, match="alpha"):
            AlphaRegion(0, 4, 11.0)

    def test_overlap_named(self):
        with pytest.raises(ValueError, match=r"\[0, 8\) and \[4, 12\)"):
            AlphaSchedule(1.0, ((0, 8, 1.5), (4, 12, 0.5)))

    def test_alpha_at(self):
        schedule = AlphaSchedule(0.5, ((16, 32, 1.5),))
        assert schedule.alpha_at(15) == 0.5
        assert schedule.alpha_at(16) == 1.5
        assert schedule.alpha_at(31) == 1.5
        assert schedule.alpha_at(32) == 0.5

    def test_regions_sorted(self):
        schedule = AlphaSchedule(1.0, ((8, 12, 2.0), (0, 4, 0.5)))
        assert [r.start for r in schedule.regions] == [0, 8]


class TestReweight:
    def test_alpha_one_identity(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            p = rng.dirichlet(np.ones(8))
            assert np.abs(reweight(p, 1.0) - p).max() <= 1e-12

    def test_uniform_fixed_point(self):
        p = np.full(5, 0.2)
        for alpha in (0.1, 0.5, 1.0, 1.5, 10.0):
            np.testing.assert_allclose(reweight(p, alpha), p, atol=1e-12)

    def test_hand_computed_example(self):
        out = reweight(np.array([0.8, 0.2]), 0.5)
        np.testing.assert_allclose(
            out, [0.9411764705882353, 0.058823529411764705], atol=1e-12
        )

    def test_zeros_stay_zero(self):
        out = reweight(np.array([0.0, 0.5, 0.5, 0.0]), 0.7)
        assert out[0] == 0.0 and out[3] == 0.0
        assert out.sum() == pytest.approx(1.0, abs=1e-12)

    @given(dirichlet_probs, st.floats(0.1, 10.0))
    @settings(max_examples=100, deadline=None)
    def test_normalization_and_ranking(self, p, alpha):
        out = reweight(p, alpha)
        assert abs(out.sum() - 1.0) <= 1e-9
        order_in = np.argsort(p, kind="stable")
        assert np.all(np.diff(out[order_in]) >= -1e-15)

    @given(dirichlet_probs, st.floats(0.2, 5.0), st.floats(0.2, 5.0))
    @settings(max_examples=100, deadline=None)
    def test_composition_law(self, p, a, b):
        lhs = reweight(reweight(p, a), b)
        rhs = reweight(p, a * b)
        assert np.abs(lhs - rhs).max() <= 1e-9

    def test_bad_alpha(self):
        with pytest.raises(ValueError, match="alpha"):
            reweight(np.array([1.0]), 0.0)
        with pytest.raises(ValueError, match="alpha"):
            reweight(np.array([1.0]), -1.0)

    def test_all_zero_rejected(self):
        with pytest.raises(ValueError, match="mass"):
            reweight(np.zeros(4), 1.0)


class TestSampleNext:
    def test_small_alpha_locks_to_argmax(self):
        model = probe_model([0.55, 0.45])
        states = model.zero_states()
        rng = np.random.default_rng(0)
        draws = [sample_next(model, states, 0, 0.01, rng)[0] for _ in range(10_000)]
        assert np.mean(np.asarray(draws) == 0) >= 0.999

    def test_fixed_seed_reproducible(self):
        model = probe_model([0.3, 0.3, 0.4])
        states = model.zero_states()
        a = sample_next(model, states, 0, 1.0, np.random.default_rng(5))[0]
        b = sample_next(model, states, 0, 1.0, np.random.default_rng(5))[0]
        assert a == b

    def test_frequencies_match_reweighted_distribution(self):
        p = np.array([0.6, 0.25, 0.1, 0.05])
        alpha = 1.5
        model = probe_model(p)
        states = model.zero_states()
        rng = np.random.default_rng(123)
        n = 100_000
        counts = np.zeros(4)
        for _ in range(n):
            counts[sample_next(model, states, 0, alpha, rng)[0]] += 1
        expected = reweight(p, alpha)
        tv = 0.5 * np.abs(counts / n - expected).sum()
        assert tv <= 0.01


class TestGenerate:
    def test_length_zero(self):
        model = probe_model([0.5, 0.5])
        out = generate(model, GenerationRequest(seed_text="w0", length=0, seed=0))
        assert len(out) == 0 and out.text() == ""

    def test_exact_length_and_flags_do_not_terminate(self):
        tokens = ["_END_", "a", "b"]
        model = probe_model([0.4, 0.3, 0.3], tokens=tokens)
        out = generate(model, GenerationRequest(seed_text="a", length=64, seed=0))
        assert len(out) == 64

    def test_oov_seed_rejected(self):
        model = probe_model([0.5, 0.5])
        with pytest.raises(OovTokenError, match="nope"):
            generate(model, GenerationRequest(seed_text="nope", length=4, seed=0))

    def test_empty_seed_rejected(self):
        model = probe_model([0.5, 0.5])
        with pytest.raises(ValueError, match="seed token"):
            generate(model, GenerationRequest(seed_text="", length=4, seed=0))

    def test_overfit_model_replays_cycle(self, memorized_chord):
        model = memorized_chord["model"]
        request = GenerationRequest(
            seed_text=CHORD_CYCLE[0],
            length=100,
            schedule=AlphaSchedule(default_alpha=0.01),
            seed=0,
        )
        out = generate(model, request).tokens()
        expected = (CHORD_CYCLE * 11)[1:101]
        assert out == expected

    def test_deterministic_given_request(self, quick_chord_model):
        request = GenerationRequest(seed_text="C:maj", length=32, seed=42)
        a = generate(quick_chord_model, request).tokens()
        b = generate(quick_chord_model, request).tokens()
        assert a == b

    def test_schedule_controls_per_index_distribution(self):
        # rare token probability must jump inside the high-alpha region
        p = np.array([0.9, 0.05, 0.05])
        model = probe_model(p)
        schedule = AlphaSchedule(0.5, ((16, 32, 1.5),))
        inside = np.zeros(3)
        outside = np.zeros(3)
        for seed in range(300):
            req = GenerationRequest(
                seed_text="w0", length=48, schedule=schedule, seed=seed
            )
            for i, tok in enumerate(generate(model, req)):
                if 16 <= i < 32:
                    inside[tok] += 1
                else:
                    outside[tok] += 1
        inside /= inside.sum()
        outside /= outside.sum()
        rare_inside = reweight(p, 1.5)[1] + reweight(p, 1.5)[2]
        rare_outside = reweight(p, 0.5)[1] + reweight(p, 0.5)[2]
        assert inside[1] + inside[2] == pytest.approx(rare_inside, abs=0.02)
        assert outside[1] + outside[2] == pytest.approx(rare_outside, abs=0.01)
        assert inside[1] + inside[2] > 10 * (outside[1] + outside[2])
