import math

import numpy as np
import pytest

from oracles import gaussian_bayes_classify, knn_full_scan
from osbkit.classical import (
    CLASSES,
    KnnModel,
    LdaModel,
    LogisticModel,
    TrainingError,
    knn_predict,
    lda_discriminant,
    lda_fit,
    lda_predict,
    log_likelihood,
    log_likelihood_gradient,
    lr_predict,
    lr_train,
    lr_train_binary,
)
from osbkit.core_data import BiomarkerVector, Dataset, LabeledSample, OcdClass


def cluster_dataset(rng, means, n_per_class, std=1.0):
    samples = []
    for cls, mean in zip(CLASSES, means):
        draws = rng.normal(np.asarray(mean, dtype=float), std, size=(n_per_class, 5))
        samples.extend(LabeledSample(BiomarkerVector(*row), cls) for row in draws)
    return Dataset(tuple(samples))


class TestLogisticBinary:
    def test_symmetry_gives_zero_intercept(self):
        x = np.zeros((40, 5))
        y = np.array([0.0, 1.0] * 20)
        beta, meta = lr_train_binary(x, y, rho=0.05, eps=1e-10, max_iter=5000, seed=0)
        assert abs(beta[0]) < 1e-6

    def test_separable_1d_reaches_perfect_accuracy(self):
        x = np.array([[-1.0]] * 50 + [[1.0]] * 50)
        y = np.array([0.0] * 50 + [1.0] * 50)
        beta, _ = lr_train_binary(x, y, rho=0.005, eps=1e-12, max_iter=50000, seed=3)
        assert beta[1] > 0
        p = 1 / (1 + np.exp(-(beta[0] + beta[1] * x[:, 0])))
        assert np.all((p > 0.5) == (y == 1))

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=(30, 5))
        y = (rng.random(30) > 0.5).astype(float)
        if y.min() == y.max():
            y[0] = 1 - y[0]
        beta = rng.normal(size=6)
        analytic = log_likelihood_gradient(beta, x, y)
        h = 1e-6
        for j in range(6):
            e = np.zeros(6)
            e[j] = h
            numeric = (log_likelihood(beta + e, x, y) - log_likelihood(beta - e, x, y)) / (2 * h)
            assert abs(analytic[j] - numeric) / max(abs(numeric), 1.0) < 1e-6

    def test_likelihood_non_decreasing_small_rho(self):
        rng = np.random.default_rng(11)
        x = rng.random((60, 5))  # normalized-scale features
        y = (x[:, 0] > 0.5).astype(float)
        beta = np.zeros(6)
        prev = log_likelihood(beta, x, y)
        for _ in range(200):
            beta = beta + 1e-3 * log_likelihood_gradient(beta, x, y)
            cur = log_likelihood(beta, x, y)
            assert cur >= prev - 1e-12
            prev = cur

    def test_single_class_rejected(self):
        with pytest.raises(TrainingError):
            lr_train_binary(np.zeros((10, 5)), np.ones(10))

    def test_bad_hyperparameters_rejected(self):
        x = np.zeros((4, 5))
        y = np.array([0.0, 1.0, 0.0, 1.0])
        with pytest.raises(TrainingError):
            lr_train_binary(x, y, rho=-1)
        with pytest.raises(TrainingError):
            lr_train_binary(x, y, eps=0)


class TestLogisticMulticlass:
    def test_well_separated_clusters_high_accuracy(self):
        rng = np.random.default_rng(0)
        means = [(0, 0, 0, 0, 0), (6, 0, 0, 0, 0), (0, 6, 0, 0, 0)]
        data = cluster_dataset(rng, means, 50)
        model = lr_train(data, rho=0.005, eps=1e-9, max_iter=2000, seed=0)
        hits = sum(lr_predict(model, s.features)[0] is s.label for s in data)
        assert hits / len(data) >= 0.95

    def test_sample_order_invariance(self):
        rng = np.random.default_rng(1)
        data = cluster_dataset(rng, [(0,) * 5, (3,) * 5, (6,) * 5], 10)
        perm = np.random.default_rng(2).permutation(len(data))
        shuffled = data.subset(perm)
        m1 = lr_train(data, max_iter=200, seed=9)
        m2 = lr_train(shuffled, max_iter=200, seed=9)
        for c in CLASSES:
            assert np.allclose(m1.betas[c], m2.betas[c], rtol=0, atol=1e-12)

    def test_missing_class_rejected(self):
        samples = tuple(
            LabeledSample(BiomarkerVector(*np.arange(5) + i), OcdClass.HI) for i in range(4)
        ) + tuple(
            LabeledSample(BiomarkerVector(*np.arange(5) - i), OcdClass.OAI) for i in range(4)
        )
        with pytest.raises(TrainingError, match="GAI"):
            lr_train(Dataset(samples))


class TestLogisticPredict:
    def test_zero_weights_tie_goes_to_hi(self):
        model = LogisticModel(betas={c: (0.0,) * 6 for c in CLASSES}, metadata={})
        cls, probs = lr_predict(model, BiomarkerVector(1, 2, 3, 4, 5))
        assert cls is OcdClass.HI
        assert probs[OcdClass.HI] == pytest.approx(1 / 3)

    def test_raw_sigmoid_score(self):
        betas = {c: (0.0,) * 6 for c in CLASSES}
        betas[OcdClass.HI] = (0.0, 1.0, 0.0, 0.0, 0.0, 0.0)
        model = LogisticModel(betas=betas, metadata={})
        _, probs = lr_predict(model, BiomarkerVector(math.log(3), 0, 0, 0, 0))
        # sigmoid(ln 3) = 0.75, the others stay at 0.5
        assert probs[OcdClass.HI] == pytest.approx(0.75 / 1.75)

    def test_argmax_invariant_under_winner_boost(self):
        rng = np.random.default_rng(4)
        betas = {c: tuple(rng.normal(size=6)) for c in CLASSES}
        model = LogisticModel(betas=betas, metadata={})
        x = BiomarkerVector(*rng.random(5))
        winner, _ = lr_predict(model, x)
        boosted = dict(betas)
        boosted[winner] = tuple(3.0 * b for b in betas[winner])
        # sigmoid is monotone, so scaling the winning logit upward keeps it winning
        if np.dot(betas[winner], [1, *x.values()]) > 0:
            assert lr_predict(LogisticModel(boosted, {}), x)[0] is winner


class TestLdaFit:
    def test_equal_counts_equal_priors(self):
        rng = np.random.default_rng(2)
        data = cluster_dataset(rng, [(0,) * 5, (3,) * 5, (6,) * 5], 30)
        model = lda_fit(data)
        assert model.priors == pytest.approx((1 / 3, 1 / 3, 1 / 3))

    def test_pooled_variance_hand_example(self):
        # 1-D two-class data {class1: -1,+1; class2: 1,3}: means (0, 2),
        # pooled variance (1+1+1+1)/(4-2) = 2, checked on the first feature
        samples = [
            LabeledSample(BiomarkerVector(-1, 0, 1, 0, 0), OcdClass.HI),
            LabeledSample(BiomarkerVector(1, 1, 0, 1, 1), OcdClass.HI),
            LabeledSample(BiomarkerVector(1, 0, 1, 0, 0), OcdClass.GAI),
            LabeledSample(BiomarkerVector(3, 1, 0, 1, 1), OcdClass.GAI),
            LabeledSample(BiomarkerVector(0, 0, 0, 1, 0), OcdClass.OAI),
            LabeledSample(BiomarkerVector(2, 1, 1, 0, 1), OcdClass.OAI),
        ]
        model = lda_fit(Dataset(tuple(samples)))
        assert model.means[0][0] == pytest.approx(0.0)
        assert model.means[1][0] == pytest.approx(2.0)
        # feature 0 deviations: class1 (1,1), class2 (1,1), class3 (1,1); /(6-3)
        assert model.variances[0] == pytest.approx(2.0)

    def test_zero_variance_rejected(self):
        samples = tuple(
            LabeledSample(BiomarkerVector(1, 2, 3, 4, 5), c) for c in CLASSES for _ in range(2)
        )
        with pytest.raises(TrainingError):
            lda_fit(Dataset(samples))

    def test_small_class_rejected(self):
        samples = (
            LabeledSample(BiomarkerVector(0, 0, 0, 0, 0), OcdClass.HI),
            LabeledSample(BiomarkerVector(1, 1, 1, 1, 1), OcdClass.HI),
            LabeledSample(BiomarkerVector(2, 2, 2, 2, 2), OcdClass.GAI),
            LabeledSample(BiomarkerVector(3, 3, 3, 3, 3), OcdClass.GAI),
            LabeledSample(BiomarkerVector(4, 4, 4, 4, 4), OcdClass.OAI),
        )
        with pytest.raises(TrainingError, match="OAI"):
            lda_fit(Dataset(samples))


class TestLdaDiscriminant:
    def two_class_1d(self, priors):
        return LdaModel(
            priors=priors,
            means=((0, 0, 0, 0, 0), (2, 0, 0, 0, 0)),
            variances=(1, 1, 1, 1, 1),
        )

    def test_midpoint_equal_priors(self):
        model = self.two_class_1d((0.5, 0.5))
        x = BiomarkerVector(1, 0, 0, 0, 0)
        assert lda_discriminant(model, x, 1) == pytest.approx(math.log(0.5))
        assert lda_discriminant(model, x, 2) == pytest.approx(math.log(0.5))

    def test_midpoint_skewed_priors(self):
        model = self.two_class_1d((0.8, 0.2))
        x = BiomarkerVector(1, 0, 0, 0, 0)
        assert lda_discriminant(model, x, 1) == pytest.approx(math.log(0.8))
        assert lda_discriminant(model, x, 2) == pytest.approx(math.log(0.2))
        assert lda_predict(model, x) is OcdClass.HI

    def test_argmax_invariant_under_joint_translation(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            means = tuple(tuple(rng.normal(size=5)) for _ in range(3))
            model = LdaModel(priors=(0.2, 0.5, 0.3), means=means, variances=tuple(rng.random(5) + 0.1))
            x = rng.normal(size=5)
            shift = rng.normal(size=5)
            shifted = LdaModel(
                priors=model.priors,
                means=tuple(tuple(np.asarray(m) + shift) for m in means),
                variances=model.variances,
            )
            assert lda_predict(model, BiomarkerVector(*x)) is lda_predict(
                shifted, BiomarkerVector(*(x + shift))
            )


class TestLdaPredict:
    def test_class_mean_with_equal_priors(self):
        rng = np.random.default_rng(3)
        data = cluster_dataset(rng, [(0,) * 5, (6,) * 5, (12,) * 5], 30)
        model = lda_fit(data)
        assert lda_predict(model, BiomarkerVector(*model.means[0])) is OcdClass.HI

    def test_agrees_with_bayes_density_oracle(self):
        rng = np.random.default_rng(12)
        for trial in range(20):
            means = [rng.normal(scale=3, size=5) for _ in range(3)]
            data = cluster_dataset(rng, means, 20)
            model = lda_fit(data)
            for _ in range(10):
                x = rng.normal(scale=4, size=5)
                expected = gaussian_bayes_classify(model.priors, model.means, model.variances, x)
                assert lda_predict(model, BiomarkerVector(*x)) is expected

    def test_full_tie_goes_to_hi(self):
        model = LdaModel(
            priors=(1 / 3, 1 / 3, 1 / 3),
            means=((1,) * 5,) * 3,
            variances=(1,) * 5,
        )
        assert lda_predict(model, BiomarkerVector(0, 1, 2, 3, 4)) is OcdClass.HI


class TestKnn:
    def small_training_set(self):
        rows = [
            ((0, 0, 0, 0, 0), OcdClass.HI),
            ((0.1, 0, 0, 0, 0), OcdClass.HI),
            ((0.2, 0, 0, 0, 0), OcdClass.OAI),
            ((5, 5, 5, 5, 5), OcdClass.GAI),
            ((5, 5, 5, 5, 6), OcdClass.GAI),
        ]
        return Dataset(
            tuple(LabeledSample(BiomarkerVector(*f), lbl) for f, lbl in rows)
        )

    def test_k1_exact_match(self):
        model = KnnModel(self.small_training_set(), k=1)
        assert knn_predict(model, BiomarkerVector(5, 5, 5, 5, 5)) is OcdClass.GAI

    def test_k3_majority(self):
        model = KnnModel(self.small_training_set(), k=3)
        # nearest three to the origin: HI, HI, OAI
        assert knn_predict(model, BiomarkerVector(0, 0, 0, 0, 0)) is OcdClass.HI

    def test_majority_tie_lowest_code(self):
        rows = [
            ((1, 0, 0, 0, 0), OcdClass.OAI),
            ((-1, 0, 0, 0, 0), OcdClass.HI),
            ((9, 9, 9, 9, 9), OcdClass.GAI),
        ]
        training = Dataset(tuple(LabeledSample(BiomarkerVector(*f), lbl) for f, lbl in rows))
        model = KnnModel(training, k=2)
        assert knn_predict(model, BiomarkerVector(0, 0, 0, 0, 0)) is OcdClass.HI

    def test_distance_tie_lower_index(self):
        rows = [
            ((1, 0, 0, 0, 0), OcdClass.OAI),
            ((-1, 0, 0, 0, 0), OcdClass.GAI),
            ((0, 1, 0, 0, 0), OcdClass.HI),
        ]
        training = Dataset(tuple(LabeledSample(BiomarkerVector(*f), lbl) for f, lbl in rows))
        # all three are at distance 1; k=1 must take stored index 0
        assert knn_predict(KnnModel(training, k=1), BiomarkerVector(0, 0, 0, 0, 0)) is OcdClass.OAI

    def test_agrees_with_full_scan_oracle(self):
        rng = np.random.default_rng(21)
        data = cluster_dataset(rng, [(0,) * 5, (2,) * 5, (4,) * 5], 15)
        feats = data.features()
        labels = data.labels()
        for k in (1, 3, 5):
            model = KnnModel(data, k=k)
            for _ in range(30):
                x = rng.normal(loc=2, scale=2, size=5)
                assert knn_predict(model, BiomarkerVector(*x)) is knn_full_scan(feats, labels, x, k)

    def test_k_bounds(self):
        with pytest.raises(TrainingError):
            KnnModel(self.small_training_set(), k=0)
        with pytest.raises(TrainingError):
            KnnModel(self.small_training_set(), k=6)
