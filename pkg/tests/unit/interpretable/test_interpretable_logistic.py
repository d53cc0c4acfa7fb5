# tests/unit/interpretable/test_interpretable_logistic.py

import pytest
import numpy as np
from scipy.optimize import minimize
from scipy.special import expit
from glassbox.interpretable.logistic import (fit_sparse_logistic, cv_lambda_path, lambda_max, lambda_grid, fit_path,
objective, kkt_violation, stratified_folds)

@pytest.fixture
def problem():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((80, 10))
    X = (X - X.mean(axis=0)) / X.std(axis=0)
    logits = 1.5 * X[:, 0] - 1.0 * X[:, 3] + 0.5 * X[:, 7]
    y = (rng.random(80) < expit(logits)).astype(np.int64)
    return X, y

def l1_oracle(X, y, lam):
    """Solve the same problem with L-BFGS-B on the split (beta+, beta-) >= 0 parameterization."""
    P = X.shape[1]
    def fun(z):
        intercept, plus, minus = z[0], z[1:P + 1], z[P + 1:]
        eta = intercept + X @ (plus - minus)
        value = np.sum(np.logaddexp(0.0, eta) - y * eta) + lam * np.sum(plus + minus)
        residual = expit(eta) - y
        gradient_beta = X.T @ residual
        return value, np.concatenate([[residual.sum()], gradient_beta + lam, -gradient_beta + lam])
    bounds = [(None, None)] + [(0.0, None)] * (2 * P)
    result = minimize(fun, np.zeros(2 * P + 1), jac=True, method='L-BFGS-B', bounds=bounds,
        options={'ftol': 1e-15, 'gtol': 1e-11, 'maxiter': 20000})
    return result.fun

class TestFitSparseLogistic:
    """
    Tests for the coordinate descent solver.
    """

    @pytest.mark.parametrize("factor", [1.0, 2.0])
    def test_lambda_max_zeroes_every_coefficient(self, problem, factor):
        X, y = problem
        fit = fit_sparse_logistic(X, y, factor * lambda_max(X, y))
        assert fit.n_active == 0
        assert fit.converged
        assert fit.intercept == pytest.approx(np.log(y.mean() / (1 - y.mean())), abs=1e-6)

    def test_separable_data_sets_flag(self):
        """
        Unpenalized fits on separable data diverge; the solver stops and reports it.
        """
        fit = fit_sparse_logistic(np.array([[-1.0], [1.0]]), np.array([0, 1]), 0.0)
        assert not fit.converged
        assert abs(fit.beta[0]) > 10

    def test_matches_independent_solver(self):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((50, 5))
        y = (rng.random(50) < expit(X[:, 0] - X[:, 1])).astype(np.int64)
        lam = 0.2 * lambda_max(X, y)
        fit = fit_sparse_logistic(X, y, lam)
        ours = objective(fit.beta, fit.intercept, X, y, lam)
        oracle = l1_oracle(X, y, lam)
        assert ours <= oracle * (1 + 1e-4)
        assert abs(ours - oracle) <= 1e-4 * abs(oracle)

    @pytest.mark.parametrize("ratio", [0.5, 0.1, 0.01])
    def test_kkt_conditions_hold(self, problem, ratio):
        X, y = problem
        lam = ratio * lambda_max(X, y)
        fit = fit_sparse_logistic(X, y, lam, tol=1e-10)
        assert fit.converged
        assert kkt_violation(fit.beta, fit.intercept, X, y, lam) <= 1e-5

    def test_negative_lambda_rejected(self, problem):
        X, y = problem
        with pytest.raises(ValueError, match="nonnegative"):
            fit_sparse_logistic(X, y, -1.0)

    def test_non_binary_labels_rejected(self, problem):
        X, _ = problem
        with pytest.raises(ValueError, match="binary"):
            fit_sparse_logistic(X, np.full(80, 2), 1.0)

class TestRegularizationPath:
    """
    Tests for warm-started paths and cross-validated selection.
    """

    def test_grid_endpoints(self, problem):
        X, y = problem
        grid = lambda_grid(X, y, n_lambda=100)
        assert grid[0] == pytest.approx(lambda_max(X, y))
        assert grid[-1] == pytest.approx(1e-3 * lambda_max(X, y))
        assert np.all(np.diff(grid) < 0)

    def test_path_objective_is_monotone(self, problem):
        X, y = problem
        grid = lambda_grid(X, y, n_lambda=30)
        fits = fit_path(X, y, grid)
        assert fits[0].n_active == 0
        values = [objective(fit.beta, fit.intercept, X, y, lam) for fit, lam in zip(fits, grid)]
        assert np.all(np.diff(values) <= 1e-6)

    def test_cv_fit_carries_path_and_curve(self, problem):
        X, y = problem
        fit = cv_lambda_path(X, y, n_lambda=20, feature_names=[f'f{j}' for j in range(10)])
        assert len(fit.lambda_path) == len(fit.cv_mean) == len(fit.cv_stderr) == 20
        assert fit.path_coefficients.shape == (20, 10)
        assert fit.lam == pytest.approx(fit.lambda_path[fit.selected_index])
        np.testing.assert_array_equal(fit.beta, fit.path_coefficients[fit.selected_index])
        assert fit.selected_index == int(np.flatnonzero(fit.cv_mean == fit.cv_mean.max())[0])
        assert set(fit.active_set.tolist()) == set(np.flatnonzero(fit.beta).tolist())

    def test_duplicated_rows_select_same_grid_point(self, problem):
        """
        The loss is a sum, so duplicating every row doubles lambda_max and leaves the selection unchanged.
        """
        X, y = problem
        fold_ids = stratified_folds(y, 4, 0)
        original = cv_lambda_path(X, y, n_lambda=20, fold_ids=fold_ids, tol=1e-10)
        doubled = cv_lambda_path(np.vstack([X, X]), np.concatenate([y, y]), n_lambda=20,
            fold_ids=np.concatenate([fold_ids, fold_ids]), tol=1e-10)
        assert doubled.selected_index == original.selected_index
        assert doubled.lam == pytest.approx(2 * original.lam)
        np.testing.assert_allclose(doubled.beta, original.beta, atol=1e-5)

    def test_degenerate_fold(self, problem):
        X, y = problem
        fold_ids = np.where(y == 1, 0, 1 + np.arange(80) % 3)
        with pytest.raises(ValueError, match="degenerate fold"):
            cv_lambda_path(X, y, fold_ids=fold_ids, n_lambda=5)

    def test_too_few_rows(self):
        with pytest.raises(ValueError, match="4-fold"):
            cv_lambda_path(np.zeros((3, 2)), np.array([0, 1, 0]))

@pytest.mark.slow
class TestDefaultSimulation:
    """
    End-to-end checks on the default simulation.
    """

    def test_featurized_active_set_size(self):
        from glassbox.simulation import SimConfig, simulate
        from glassbox.features import featurize
        dataset = simulate(SimConfig())
        matrix = featurize(dataset, 'featurized')
        train = dataset.train_mask
        fit = cv_lambda_path(matrix.values[train], dataset.y[train])
        assert 30 <= fit.n_active <= 70
        assert 0 < fit.selected_index < 99
