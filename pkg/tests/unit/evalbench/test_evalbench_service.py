# tests/unit/evalbench/test_evalbench_service.py

import pytest
import numpy as np
from dataclasses import replace
from glassbox.evalbench import (Table1Config, AblationConfig, EvalReport, FittedLearner, MissingGroundTruthError,
run_table1, fit_row, ablation_benchmark, ground_truth_faithfulness, run_stability, rank_cells, mask_cells,
precision_at_k, cell_importance, machine_descriptor, sparse_logistic_learner)
from glassbox.explain import Attribution, occlusion
from glassbox.simulation import SimConfig, simulate
from glassbox.simulation.utils import make_rng

SMALL_SIM = SimConfig(n_subjects=60, n_timepoints=12, n_species=6, n_communities=3, n_clusters=4, n_disease_clusters=2)

@pytest.fixture(scope='module')
def table1_config():
    return Table1Config(n_list=(60,), seeds=(1,), models=('sparse_logistic', 'tree', 'majority'), sim=SMALL_SIM,
        n_lambda=10)

@pytest.fixture(scope='module')
def report(table1_config):
    return run_table1(table1_config)

@pytest.fixture(scope='module')
def truth_dataset():
    return simulate(SimConfig(n_subjects=120, n_timepoints=30, n_species=12, n_communities=6, n_clusters=6,
        n_disease_clusters=3, seed=11))

def attribution_for(sample_id, values, method='integrated_gradients'):
    return Attribution(sample_id=sample_id, method=method, values=values, target_class=1, baseline='zero',
        prediction=0.5, baseline_prediction=0.5)

class TestTable1:
    """
    Tests for the accuracy and timing grid (table1 suite).
    """

    def test_one_row_per_model_and_representation(self, report):
        assert len(report.rows) == 6
        assert all(row.is_success for row in report.rows)
        assert {(row.representation, row.model) for row in report.rows} == {
            (representation, model) for representation in ('raw', 'featurized')
            for model in ('sparse_logistic', 'tree', 'majority')}

    def test_accuracies_are_fractions(self, report):
        for row in report.rows:
            assert 0.0 <= row.in_sample_acc <= 1.0
            assert 0.0 <= row.out_sample_acc <= 1.0
            assert row.train_time_s >= 0.0
            assert len(row.config_hash) == 64

    def test_model_sizes(self, report):
        for row in report.rows:
            if row.model == 'sparse_logistic':
                assert row.n_active_features is not None and row.n_splits is None
            elif row.model == 'tree':
                assert row.n_splits is not None and row.n_active_features is None

    def test_majority_row(self, report):
        dataset = simulate(SMALL_SIM.model_copy(update={'n_subjects': 60, 'seed': 1}))
        majority = int(dataset.y[dataset.train_mask].mean() >= 0.5)
        expected = np.mean(dataset.y[dataset.val_mask] == majority)
        rows = [row for row in report.rows if row.model == 'majority']
        assert all(row.out_sample_acc == pytest.approx(expected) for row in rows)

    def test_rerun_reproduces_accuracies(self, report, table1_config):
        again = run_table1(table1_config)
        for first, second in zip(report.rows, again.rows):
            assert (first.in_sample_acc, first.out_sample_acc) == (second.in_sample_acc, second.out_sample_acc)
            assert first.config_hash == second.config_hash

    def test_failure_is_recorded_on_the_row(self, table1_config, mocker):
        mocker.patch('glassbox.evalbench.service.fit_tree', side_effect=RuntimeError("boom"))
        result = run_table1(table1_config)
        failed = [row for row in result.rows if not row.is_success]
        assert {row.model for row in failed} == {'tree'}
        assert all(row.error == "RuntimeError: boom" for row in failed)
        assert "error: RuntimeError: boom" in result.table1()

    def test_sequence_models_need_raw_tokens(self, table1_config):
        dataset = simulate(SMALL_SIM)
        row = fit_row(dataset, 'featurized', 'transformer', table1_config, 0)
        assert not row.is_success
        assert "raw token representation" in row.error

    def test_unknown_model_rejected(self):
        with pytest.raises(ValueError, match="Unknown models"):
            Table1Config(models=('svm',))

    def test_render_and_document(self, report):
        text = report.render()
        assert 'Out-of-sample' in text
        assert 'Machine:' in text
        restored = EvalReport.from_dict(report.to_dict())
        assert restored.rows == report.rows
        assert restored.machine == report.machine

    def test_machine_descriptor(self):
        machine = machine_descriptor()
        assert machine.cpu_count >= 1
        assert machine.memory_gb > 0

    @pytest.mark.slow
    def test_default_scale_patterns(self):
        result = run_table1(Table1Config(models=('sparse_logistic', 'tree')))
        rows = {(row.representation, row.model): row for row in result.rows}
        assert 0.80 <= rows['featurized', 'sparse_logistic'].out_sample_acc <= 0.95
        tree = rows['raw', 'tree']
        assert tree.in_sample_acc - tree.out_sample_acc >= 0.10

class FakeLearner:
    """Accuracy drops by 0.1 for every relevant cell that has been flattened to a constant."""

    def __init__(self, relevant):
        self.relevant = relevant
        self.calls = 0

    def __call__(self, dataset):
        self.calls += 1
        flat = dataset.X.reshape(dataset.n_subjects, -1)
        n_flat = sum(np.ptp(flat[:, cell]) == 0 for cell in self.relevant)
        return FittedLearner(model=None, standardize=lambda X: X, accuracy=lambda X, y: 1.0 - 0.1 * n_flat)

class TestAblation:
    """
    Tests for the ablation-retraining benchmark.
    """

    @pytest.fixture(scope='class')
    def dataset(self):
        return simulate(SMALL_SIM)

    def test_rank_cells_prefers_large_importance(self):
        importance = np.array([[0.1, 0.9], [0.5, 0.0]])
        np.testing.assert_array_equal(rank_cells(importance, 2, make_rng(0, 'ablation-ties')), [1, 2])

    def test_rank_cells_ties_follow_seed(self):
        ranked = rank_cells(np.ones((3, 4)), 12, make_rng(5, 'ablation-ties'))
        assert sorted(ranked.tolist()) == list(range(12))
        np.testing.assert_array_equal(ranked, rank_cells(np.ones((3, 4)), 12, make_rng(5, 'ablation-ties')))

    def test_mask_cells(self):
        X = np.arange(24, dtype=float).reshape(2, 3, 4)
        fill = -np.ones((3, 4))
        masked = mask_cells(X, np.array([0, 5]), fill)
        assert np.all(masked[:, 0, 0] == -1) and np.all(masked[:, 1, 1] == -1)
        assert np.sum(masked == -1) == 4
        assert X[0, 0, 0] == 0.0

    def test_guided_mask_beats_random_on_relevant_cells(self, dataset):
        learner = FakeLearner(relevant=[0, 1, 2])
        importance = np.zeros((12, 6))
        importance.flat[[0, 1, 2]] = 1.0
        record = ablation_benchmark(dataset, learner, AblationConfig(q=0.1), importance=importance)
        assert learner.calls == 3
        assert record.n_masked_cells == record.n_random_cells == 7
        assert record.guided_accuracy == pytest.approx(0.7)
        assert record.gap >= 0.0

    def test_tiny_q_masks_nothing(self, dataset):
        record = ablation_benchmark(dataset, FakeLearner(relevant=[0]), AblationConfig(q=1e-4),
            importance=np.ones((12, 6)))
        assert record.n_masked_cells == 0
        assert record.guided_drop == 0.0 and record.random_drop == 0.0

    def test_importance_shape(self, dataset):
        with pytest.raises(ValueError, match="Importance map"):
            ablation_benchmark(dataset, FakeLearner(relevant=[0]), importance=np.ones((3, 3)))

    def test_q_range(self):
        with pytest.raises(ValueError):
            AblationConfig(q=1.0)

    def test_integrated_gradients_pipeline(self, dataset):
        config = AblationConfig(q=0.1, n_steps=8, n_samples=5, n_lambda=5)
        record = ablation_benchmark(dataset, sparse_logistic_learner(n_lambda=5), config)
        assert record.method == 'integrated_gradients'
        assert record.n_masked_cells == 7
        assert 0.0 <= record.guided_accuracy <= 1.0
        assert 0.0 <= record.random_accuracy <= 1.0

    def test_cell_importance_is_mean_magnitude(self):
        attributions = [attribution_for(0, np.array([[1.0, -2.0]])), attribution_for(1, np.array([[-3.0, 0.0]]))]
        np.testing.assert_allclose(cell_importance(attributions), [[2.0, 1.0]])

class TestFaithfulness:
    """
    Tests for scoring attributions against the simulator's signal cells.
    """

    def test_precision_at_k(self):
        values = np.array([[0.9, -0.8], [0.1, 0.0]])
        truth = np.array([[True, False], [True, False]])
        assert precision_at_k(values, truth, 1) == 1.0
        assert precision_at_k(values, truth, 2) == 0.5

    def test_perfect_attribution(self, truth_dataset):
        truth = truth_dataset.ground_truth
        ids = [i for i in range(40) if truth.truth_mask(i).any()][:10]
        attributions = [attribution_for(i, truth.truth_mask(i).astype(float)) for i in ids]
        k = min(int(truth.truth_mask(i).sum()) for i in ids)
        score = ground_truth_faithfulness(attributions, truth_dataset, k=k)
        assert score.status == 'ok'
        assert score.precision_at_k == 1.0
        assert 0.0 < score.base_rate <= 1.0

    def test_occlusion_against_itself_correlates_perfectly(self, truth_dataset):
        rng = np.random.default_rng(0)
        attributions = [attribution_for(i, rng.normal(size=(30, 12)), 'occlusion') for i in range(5)]
        score = ground_truth_faithfulness(attributions, truth_dataset, occlusions=attributions)
        assert score.rank_correlation == pytest.approx(1.0)

    def test_random_attribution_matches_base_rate(self, truth_dataset):
        rng = np.random.default_rng(1)
        attributions = [attribution_for(i, rng.normal(size=(30, 12))) for i in range(20)]
        score = ground_truth_faithfulness(attributions, truth_dataset, k=50, n_shuffles=100)
        assert score.shuffled_precision == pytest.approx(score.base_rate, abs=0.03)

    def test_linear_occlusion_correlation(self, truth_dataset):
        class Linear:
            def score(self, Z, target=1):
                return np.asarray(Z).reshape(len(Z), -1).sum(axis=1)
        Z = np.random.default_rng(2).normal(size=(3, 30, 12))
        occlusions = [replace(occlusion(Linear(), Z[i]), sample_id=i) for i in range(3)]
        attributions = [attribution_for(i, Z[i]) for i in range(3)]
        score = ground_truth_faithfulness(attributions, truth_dataset, occlusions=occlusions)
        assert score.rank_correlation == pytest.approx(1.0)

    def test_all_noise_dictionary_reports_no_signal(self):
        dataset = simulate(SimConfig(n_subjects=20, n_timepoints=12, n_species=4, n_communities=3, n_clusters=2,
            n_disease_clusters=1, kind_probs=(1.0, 0.0, 0.0, 0.0)))
        attributions = [attribution_for(i, np.ones((12, 4))) for i in range(3)]
        score = ground_truth_faithfulness(attributions, dataset)
        assert score.status == 'no signal'
        assert score.precision_at_k is None
        assert not score.has_signal

    def test_missing_ground_truth(self, truth_dataset):
        dataset = replace(truth_dataset, ground_truth=None)
        with pytest.raises(MissingGroundTruthError, match="ground truth"):
            ground_truth_faithfulness([attribution_for(0, np.zeros((30, 12)))], dataset)

class TestStability:
    """
    Tests for the stability suite.
    """

    def test_records_both_representations(self):
        result = run_stability(SMALL_SIM.model_copy(update={'n_subjects': 80}), seeds=(0,), n_lambda=5)
        assert [record.representation for record in result.stability] == ['raw', 'featurized']
        for record in result.stability:
            assert len(record.active_sizes) == 2
            assert record.overlap <= min(record.active_sizes)
        assert 'Overlap' in result.render()
