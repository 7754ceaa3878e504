import numpy as np
import pytest

from topiclabel.errors import DegenerateTrainingError, FormatError
from topiclabel.features import FeatureVector
from topiclabel.ranker import (
    GoldRating,
    RankerConfig,
    RegressionModel,
    fit,
    gold_index,
    load_model,
    predict,
    read_gold,
    rerank,
    save_model,
    write_gold,
)


def fv(rank=1, pr=0.5, overlap=0, words=1):
    return FeatureVector(rank, pr, overlap, words)


def linear_pairs(n=24, seed=0, noise=0.0, slope=0.4, intercept=0.8):
    """Targets exactly linear in the pagerank feature, others constant."""
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(n):
        x = float(rng.uniform(0.0, 1.0))
        y = float(np.clip(slope * x + intercept + rng.normal(0, noise), 0, 3))
        pairs.append((fv(rank=1, pr=x, overlap=2, words=2), y))
    return pairs


class TestFit:
    def test_exact_linear_fit(self):
        pairs = linear_pairs()
        config = RankerConfig(cost=1.0, epsilon=0.0, epochs=20000)
        model = fit(pairs, config)
        for feature_vector, target in pairs:
            assert predict(model, feature_vector) == pytest.approx(target, abs=1e-3)

    def test_constant_targets(self):
        pairs = [(fv(rank=i + 1, pr=0.1 * i), 1.7) for i in range(10)]
        model = fit(pairs)
        for feature_vector, _ in pairs:
            assert predict(model, feature_vector) == pytest.approx(1.7, rel=1e-12)
        assert np.all(np.abs(model.weights) < 1e-9)

    def test_anticorrelated_feature_gets_negative_weight(self):
        rng = np.random.default_rng(1)
        pairs = []
        for _ in range(30):
            x = float(rng.uniform(0, 1))
            pairs.append((fv(pr=x), float(np.clip(2.5 - 2.0 * x, 0, 3))))
        model = fit(pairs, RankerConfig(epsilon=0.0, epochs=5000))
        assert model.weights[1] < 0

    def test_too_few_pairs(self):
        with pytest.raises(DegenerateTrainingError):
            fit([(fv(), 1.0)])

    def test_deterministic(self):
        pairs = linear_pairs(noise=0.1, seed=3)
        m1 = fit(pairs)
        m2 = fit(pairs)
        assert np.array_equal(m1.weights, m2.weights)
        assert m1.bias == m2.bias

    def test_constant_feature_passthrough(self):
        model = fit(linear_pairs())
        # rank, overlap and words are constant: std snapped to 1, finite weights
        assert np.all(model.feature_stds > 0)
        assert np.all(np.isfinite(model.weights))

    def test_feature_subset(self):
        pairs = linear_pairs()
        model = fit(pairs, feature_indices=[1])
        assert model.weights.shape == (1,)
        assert predict(model, pairs[0][0]) == pytest.approx(pairs[0][1], abs=0.05)

    def test_regularization_shrinks_weights(self):
        pairs = linear_pairs()
        strong = fit(pairs, RankerConfig(cost=1e-8, epochs=2000))
        weak = fit(pairs, RankerConfig(cost=1.0, epochs=2000))
        assert np.linalg.norm(strong.weights) < np.linalg.norm(weak.weights)
        assert np.linalg.norm(strong.weights) < 1e-3

    def test_affine_rescaling_invariance(self):
        # Standardization makes the fit invariant to positive affine maps of
        # any input feature.
        pairs = linear_pairs(noise=0.05, seed=9)
        model = fit(pairs)
        scaled_pairs = [
            (FeatureVector(p.letter_trigram_rank, 250.0 * p.pagerank + 3.0,
                           p.topic_overlap, p.num_words), y)
            for p, y in pairs
        ]
        scaled_model = fit(scaled_pairs)
        for (p, _), (sp, _) in zip(pairs, scaled_pairs):
            assert predict(model, p) == pytest.approx(
                predict(scaled_model, sp), abs=1e-3
            )


class TestPredict:
    def test_feature_means_map_to_bias(self):
        pairs = linear_pairs(seed=5)
        model = fit(pairs)
        means = model.feature_means
        query = FeatureVector(means[0], means[1], means[2], means[3])
        assert predict(model, query) == pytest.approx(model.bias, abs=1e-12)

    def test_hand_computed_dot_product(self):
        model = RegressionModel(
            weights=np.array([0.5, -1.0, 2.0, 0.0]),
            bias=1.25,
            feature_means=np.zeros(4),
            feature_stds=np.ones(4),
            config=RankerConfig(),
        )
        query = fv(rank=2, pr=0.5, overlap=1, words=3)
        assert predict(model, query) == pytest.approx(0.5 * 2 - 1.0 * 0.5 + 2.0 * 1 + 1.25)

    def test_always_finite(self):
        model = fit(linear_pairs())
        rng = np.random.default_rng(0)
        for _ in range(50):
            query = fv(
                rank=int(rng.integers(1, 100)),
                pr=float(rng.uniform(0, 1e-3)),
                overlap=int(rng.integers(0, 5)),
                words=int(rng.integers(1, 5)),
            )
            assert np.isfinite(predict(model, query))

    def test_broken_model_rejected(self):
        model = fit(linear_pairs())
        model.weights = np.array([np.nan] * 4)
        with pytest.raises(DegenerateTrainingError):
            predict(model, fv())


def trigram_only_model(weight=-1.0):
    """A model scoring purely by the (negated) trigram rank feature."""
    return RegressionModel(
        weights=np.array([weight, 0.0, 0.0, 0.0]),
        bias=0.0,
        feature_means=np.zeros(4),
        feature_stds=np.ones(4),
        config=RankerConfig(),
    )


class TestRerank:
    def test_single_candidate(self):
        model = trigram_only_model()
        assert rerank(model, [("only", fv())]) == ["only"]

    def test_trigram_weight_reproduces_baseline_order(self):
        model = trigram_only_model()
        candidates = [
            ("gamma", fv(rank=2)),
            ("alpha", fv(rank=3)),
            ("beta", fv(rank=1)),
        ]
        assert rerank(model, candidates) == ["beta", "gamma", "alpha"]

    def test_matches_brute_force_sort(self):
        rng = np.random.default_rng(11)
        pairs = linear_pairs(seed=2)
        model = fit(pairs)
        candidates = []
        for i in range(15):
            candidates.append(
                (f"label{i:02d}", fv(
                    rank=int(rng.integers(1, 20)),
                    pr=float(rng.uniform(0, 1)),
                    overlap=int(rng.integers(0, 3)),
                    words=int(rng.integers(1, 4)),
                ))
            )
        expected = [
            label for label, _ in sorted(
                candidates,
                key=lambda c: (-predict(model, c[1]), c[1].letter_trigram_rank, c[0]),
            )
        ]
        assert rerank(model, candidates) == expected

    def test_order_invariant_to_score_shifts(self):
        pairs = linear_pairs(seed=8)
        model = fit(pairs)
        candidates = [(f"l{i}", fv(rank=i + 1, pr=0.1 * i, overlap=i % 3)) for i in range(8)]
        base = rerank(model, candidates)
        shifted = RegressionModel(
            weights=model.weights * 3.0,
            bias=model.bias * 3.0 + 10.0,
            feature_means=model.feature_means,
            feature_stds=model.feature_stds,
            config=model.config,
        )
        assert rerank(shifted, candidates) == base

    def test_near_zero_cost_degenerates_to_tie_break(self):
        pairs = linear_pairs(noise=0.2, seed=4)
        model = fit(pairs, RankerConfig(cost=1e-8, epochs=2000))
        candidates = [
            ("zeta", fv(rank=1)),
            ("alpha", fv(rank=2)),
            ("mu", fv(rank=3)),
        ]
        # Predictions collapse to the bias; order falls back to trigram rank.
        assert rerank(model, candidates) == ["zeta", "alpha", "mu"]


class TestModelIO:
    def test_round_trip(self, tmp_path):
        model = fit(linear_pairs(noise=0.02, seed=6), RankerConfig(epochs=500))
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path)
        assert np.array_equal(loaded.weights, model.weights)
        assert loaded.bias == model.bias
        assert np.array_equal(loaded.feature_means, model.feature_means)
        assert np.array_equal(loaded.feature_stds, model.feature_stds)
        assert loaded.config == model.config
        assert loaded.feature_indices == model.feature_indices

    def test_bad_model_file(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text("{}")
        with pytest.raises(FormatError):
            load_model(path)


class TestGoldRatings:
    def test_validation(self):
        with pytest.raises(ValueError):
            GoldRating("t", "l", 3.5)
        with pytest.raises(ValueError):
            GoldRating("t", "l", -0.1)
        with pytest.raises(ValueError):
            GoldRating("t", "l", 1.0, n_annotations=0)

    def test_round_trip(self, tmp_path):
        ratings = [
            GoldRating("t1", "alpha", 2.4, 10),
            GoldRating("t1", "beta", 0.5, 6),
            GoldRating("t2", "alpha", 1.25, 7),
        ]
        path = tmp_path / "gold.tsv"
        write_gold(ratings, path)
        loaded = read_gold(path)
        assert loaded == sorted(ratings, key=lambda r: (r.topic_id, r.label))
        index = gold_index(loaded)
        assert index[("t1", "beta")].mean_rating == 0.5

    def test_bad_rows(self, tmp_path):
        path = tmp_path / "gold.tsv"
        path.write_text("topic_id\tlabel\tmean_rating\tn_annotations\nt1\tx\t9.0\t3\n")
        with pytest.raises(FormatError):
            read_gold(path)
