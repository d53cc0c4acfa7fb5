# tests/unit/explain/test_explain_attribution.py

import pytest
import numpy as np
from scipy.special import expit
from glassbox.explain import (GlassboxTrajectoryModel, TrajectoryModel, integrated_gradients, occlusion,
explain_samples, resolve_baseline)
from glassbox.interpretable import SparseLogisticFit

T, D = 6, 3

class LinearModel:
    """f(x) = sum(w * x), identical for both targets."""

    def __init__(self, weights):
        self.weights = weights

    def score(self, Z, target=1):
        return np.einsum('ntd,td->n', np.asarray(Z, dtype=np.float64), self.weights)

    def score_and_gradient(self, Z, target=1):
        Z = np.asarray(Z, dtype=np.float64)
        return self.score(Z, target), np.broadcast_to(self.weights, Z.shape).copy()

class ConstantModel:

    def score(self, Z, target=1):
        return np.full(len(Z), 0.3)

    def score_and_gradient(self, Z, target=1):
        return self.score(Z, target), np.zeros(np.shape(Z))

@pytest.fixture
def rng():
    return np.random.default_rng(0)

@pytest.fixture
def weights(rng):
    return rng.normal(size=(T, D))

@pytest.fixture
def logistic(rng):
    fit = SparseLogisticFit(beta=rng.normal(scale=0.5, size=T * D), intercept=0.5, lam=0.0)
    return GlassboxTrajectoryModel(fit, T, D)

class TestIntegratedGradients:
    """
    Tests for midpoint-rule integrated gradients.
    """

    def test_baseline_equal_to_input_gives_zero(self, logistic, rng):
        x = rng.normal(size=(T, D))
        result = integrated_gradients(logistic, x, baseline=x.copy())
        np.testing.assert_array_equal(result.values, 0.0)
        assert result.completeness_gap == 0.0

    @pytest.mark.parametrize("n_steps", [1, 7, 64])
    def test_linear_model_closed_form(self, weights, rng, n_steps):
        x, x0 = rng.normal(size=(T, D)), rng.normal(size=(T, D))
        result = integrated_gradients(LinearModel(weights), x, baseline=x0, n_steps=n_steps)
        np.testing.assert_allclose(result.values, (x - x0) * weights, atol=1e-6)
        assert result.completeness_gap < 1e-9

    def test_completeness_gap_shrinks_when_steps_double(self):
        model = GlassboxTrajectoryModel(SparseLogisticFit(beta=np.full(T * D, 0.25), intercept=0.5, lam=0.0), T, D)
        x = np.ones((T, D))
        gaps = [integrated_gradients(model, x, n_steps=n).completeness_gap for n in (4, 8, 16)]
        assert gaps[1] <= 0.6 * gaps[0]
        assert gaps[2] <= 0.6 * gaps[1]

    def test_records_predictions_and_metadata(self, logistic, rng):
        x = rng.normal(size=(T, D))
        result = integrated_gradients(logistic, x, target_class=0, n_steps=10, sample_id=4)
        assert result.shape == (T, D)
        assert result.baseline == 'zero'
        assert result.n_steps == 10
        assert result.sample_id == 4
        assert result.prediction == pytest.approx(1 - expit(0.5 + np.sum(logistic.weights * x)))
        assert result.baseline_prediction == pytest.approx(1 - expit(0.5))

    def test_target_classes_are_mirror_images(self, logistic, rng):
        x = rng.normal(size=(T, D))
        positive = integrated_gradients(logistic, x, target_class=1)
        negative = integrated_gradients(logistic, x, target_class=0)
        np.testing.assert_allclose(positive.values, -negative.values, atol=1e-12)

    def test_baseline_shape_mismatch(self, logistic):
        with pytest.raises(ValueError, match="does not match"):
            integrated_gradients(logistic, np.zeros((T, D)), baseline=np.zeros((T, D + 1)))

    def test_n_steps_must_be_positive(self, logistic):
        with pytest.raises(ValueError, match="n_steps"):
            integrated_gradients(logistic, np.zeros((T, D)), n_steps=0)

class TestOcclusion:
    """
    Tests for block occlusion.
    """

    def test_constant_model_gives_zero(self, rng):
        result = occlusion(ConstantModel(), rng.normal(size=(T, D)))
        assert result.shape == (T, D)
        np.testing.assert_array_equal(result.values, 0.0)

    def test_linear_model_closed_form(self, weights, rng):
        x, x0 = rng.normal(size=(T, D)), rng.normal(size=(T, D))
        result = occlusion(LinearModel(weights), x, baseline=x0)
        np.testing.assert_allclose(result.values, weights * (x - x0), atol=1e-12)

    def test_window_spreads_block_drop(self, weights, rng):
        x = rng.normal(size=(T, D))
        result = occlusion(LinearModel(weights), x, window=2)
        expected = (weights * x).reshape(T // 2, 2, D).sum(axis=1)
        np.testing.assert_allclose(result.values, np.repeat(expected, 2, axis=0), atol=1e-12)
        assert result.window == 2

    def test_ragged_last_window(self, weights, rng):
        x = rng.normal(size=(T, D))
        result = occlusion(LinearModel(weights), x, window=4)
        np.testing.assert_allclose(result.values[4:], np.broadcast_to((weights * x)[4:].sum(axis=0), (2, D)))

    @pytest.mark.parametrize("window", [0, T + 1])
    def test_window_range(self, window):
        with pytest.raises(ValueError, match="window"):
            occlusion(ConstantModel(), np.zeros((T, D)), window=window)

class TestExplainSamples:
    """
    Tests for the batch entry point.
    """

    def test_one_attribution_per_sample(self, logistic, rng):
        Z = rng.normal(size=(5, T, D))
        results = explain_samples(logistic, Z, [0, 3], n_steps=8)
        assert [result.sample_id for result in results] == [0, 3]
        np.testing.assert_allclose(results[1].values, integrated_gradients(logistic, Z[3], n_steps=8).values)

    def test_occlusion_method(self, logistic, rng):
        results = explain_samples(logistic, rng.normal(size=(2, T, D)), [1], method='occlusion')
        assert results[0].method == 'occlusion'

    def test_unknown_method(self, logistic):
        with pytest.raises(ValueError, match="Unknown attribution method"):
            explain_samples(logistic, np.zeros((2, T, D)), [0], method='shap')

    def test_sample_out_of_range(self, logistic):
        with pytest.raises(ValueError, match="out of range"):
            explain_samples(logistic, np.zeros((2, T, D)), [2])

    def test_mean_baseline(self, rng):
        Z = rng.normal(size=(4, T, D))
        mask = np.array([True, True, False, False])
        np.testing.assert_allclose(resolve_baseline('mean', Z, mask), Z[:2].mean(axis=0))
        np.testing.assert_array_equal(resolve_baseline('zero', Z), 0.0)
        with pytest.raises(ValueError, match="Unknown baseline"):
            resolve_baseline('median', Z)

class TestGlassboxTrajectoryModel:
    """
    Tests for the sparse logistic trajectory adapter.
    """

    def test_satisfies_protocol(self, logistic):
        assert isinstance(logistic, TrajectoryModel)

    def test_gradient_matches_finite_differences(self, logistic, rng):
        Z = rng.normal(size=(1, T, D))
        _, gradient = logistic.score_and_gradient(Z)
        eps = 1e-6
        for t, d in [(0, 0), (2, 1), (5, 2)]:
            shifted = Z.copy()
            shifted[0, t, d] += eps
            numeric = (logistic.score(shifted)[0] - logistic.score(Z)[0]) / eps
            assert gradient[0, t, d] == pytest.approx(numeric, rel=1e-4, abs=1e-8)

    def test_score_matches_flat_fit(self, logistic, rng):
        Z = rng.normal(size=(3, T, D))
        np.testing.assert_allclose(logistic.score(Z), logistic.fit.predict_proba(Z.reshape(3, -1)))

    def test_dimension_mismatch(self):
        fit = SparseLogisticFit(beta=np.zeros(5), intercept=0.0, lam=0.0)
        with pytest.raises(ValueError, match="T\\*D"):
            GlassboxTrajectoryModel(fit, 2, 3)
