# tests/unit/simulation/test_simulation_service.py

import pytest
import numpy as np
from glassbox.simulation.service import (increase_from_weights, bloom_from_centers, sample_increase, sample_decrease,
sample_bloom, sample_bloom_centers, bloom_center_range, sample_dictionary, sample_subjects, Simulator, simulate)
from glassbox.simulation.views import SimConfig, TrajectoryKind
from glassbox.simulation.utils import make_rng

@pytest.fixture
def small_config():
    """A small but non-degenerate configuration that generates in well under a second."""
    return SimConfig(n_subjects=120, n_timepoints=30, n_species=12, n_communities=6, n_clusters=6,
        n_disease_clusters=3, seed=11)

@pytest.fixture
def small_dataset(small_config):
    return simulate(small_config)

class TestTrajectorySamplers:
    """
    Tests for the increase, decrease and bloom trajectory constructions.
    """

    def test_single_jump_at_start_is_constant(self):
        """
        A jump only at the first timepoint yields a cumulative sum of ones, which is already normalized.
        """
        T = 10
        u = np.zeros(T)
        u[0] = 1.0
        np.testing.assert_allclose(increase_from_weights(u), np.ones(T))

    def test_uniform_weights_closed_form(self):
        """
        Uniform weights give coordinate t equal to 2t/(T+1).
        """
        T = 50
        t = np.arange(1, T + 1)
        np.testing.assert_allclose(increase_from_weights(np.full(T, 1 / T)), 2 * t / (T + 1), rtol=1e-12)

    def test_reversed_uniform_weights_closed_form(self):
        """
        Time reversal of the uniform increase gives 2(T-t+1)/(T+1).
        """
        T = 20
        t = np.arange(1, T + 1)
        reversed_trajectory = increase_from_weights(np.full(T, 1 / T))[::-1]
        np.testing.assert_allclose(reversed_trajectory, 2 * (T - t + 1) / (T + 1), rtol=1e-12)

    @pytest.mark.parametrize("seed", range(10))
    def test_increase_sums_to_T_and_is_monotone(self, seed):
        trajectory = sample_increase(make_rng(seed, 'test'), 50, 0.3)
        assert trajectory.sum() == pytest.approx(50, rel=1e-9)
        assert np.all(trajectory >= 0)
        assert np.all(np.diff(trajectory) >= 0)

    @pytest.mark.parametrize("seed", range(10))
    def test_decrease_sums_to_T_and_is_monotone(self, seed):
        trajectory = sample_decrease(make_rng(seed, 'test'), 50, 0.3)
        assert trajectory.sum() == pytest.approx(50, rel=1e-9)
        assert np.all(trajectory >= 0)
        assert np.all(np.diff(trajectory) <= 0)

    def test_decrease_is_reversed_increase_on_same_stream(self):
        increase = sample_increase(make_rng(3, 'shared'), 40, 0.3)
        decrease = sample_decrease(make_rng(3, 'shared'), 40, 0.3)
        np.testing.assert_array_equal(decrease[::-1], increase)

    def test_boxcar_bloom(self):
        """
        With r=0 the Tukey window is rectangular: value T/L inside the window, zero elsewhere.
        """
        T, L = 50, 9
        trajectory = bloom_from_centers([25], T, 0.0, L)
        inside = np.zeros(T, dtype=bool)
        inside[21:30] = True
        np.testing.assert_allclose(trajectory[inside], T / L)
        assert np.all(trajectory[~inside] == 0)

    def test_single_tapered_bloom_has_one_peak(self):
        T, L = 50, 9
        trajectory = bloom_from_centers([20], T, 0.9, L)
        support = np.flatnonzero(trajectory > 0)
        assert support.max() - support.min() + 1 <= L
        interior = trajectory[1:-1]
        peaks = (interior > trajectory[:-2]) & (interior >= trajectory[2:])
        assert peaks.sum() == 1
        assert np.argmax(trajectory) == 20

    @pytest.mark.parametrize("seed", range(10))
    def test_bloom_sums_to_T(self, seed):
        trajectory = sample_bloom(make_rng(seed, 'bloom'), 50, 2.0, 0.9, 9)
        assert trajectory.sum() == pytest.approx(50, rel=1e-9)
        assert np.all(trajectory >= 0)

class TestSampleDictionary:
    """
    Tests for the community trajectory dictionary.
    """

    def test_all_noise_when_forced(self):
        config = SimConfig(n_species=20, n_communities=4, kind_probs=(1.0, 0.0, 0.0, 0.0))
        dictionary = sample_dictionary(make_rng(0, 'dictionary'), config)
        assert np.all(dictionary.kinds == TrajectoryKind.NOISE)
        assert dictionary.entries.min() >= 0
        assert dictionary.entries.max() <= 0.01
        assert dictionary.bloom_centers == []

    def test_noise_fraction_matches_binomial(self):
        config = SimConfig()
        dictionary = sample_dictionary(make_rng(config.seed, 'dictionary'), config)
        n = dictionary.kinds.size
        assert n == 3600
        sigma = np.sqrt(0.7 * 0.3 / n)
        fraction = np.mean(dictionary.kinds == TrajectoryKind.NOISE)
        assert abs(fraction - 0.7) <= 3 * sigma

    def test_non_noise_columns_sum_to_T(self, small_config):
        dictionary = sample_dictionary(make_rng(1, 'dictionary'), small_config)
        T = small_config.n_timepoints
        sums = dictionary.entries.sum(axis=1)
        signal = dictionary.kinds != TrajectoryKind.NOISE
        np.testing.assert_allclose(sums[signal], T, rtol=1e-9)
        noise_columns = dictionary.entries.transpose(0, 2, 1)[~signal]
        assert np.all((noise_columns >= 0) & (noise_columns <= small_config.noise_high))

    def test_bloom_centers_recorded_for_bloom_columns(self, small_config):
        dictionary = sample_dictionary(make_rng(2, 'dictionary'), small_config)
        bloom_columns = {(k, d) for k, d in zip(*np.nonzero(dictionary.kinds == TrajectoryKind.BLOOM))}
        recorded = {(k, d) for k, d, _ in dictionary.bloom_centers}
        assert recorded == bloom_columns
        L, T = small_config.tukey_window, small_config.n_timepoints
        assert all(L <= center <= T - L for _, _, center in dictionary.bloom_centers)

    def test_fixed_seed_is_byte_identical(self, small_config):
        first = Simulator(small_config).generate_dictionary()
        second = Simulator(small_config).generate_dictionary()
        assert first.entries.tobytes() == second.entries.tobytes()
        assert first.kinds.tobytes() == second.kinds.tobytes()

    @pytest.mark.parametrize("T, L, expected", [
        (50, 9, (9, 41)),
        (18, 9, (9, 9)),
        (12, 9, (4, 7)),
        (10, 9, (4, 5)),
    ])
    def test_bloom_center_range(self, T, L, expected):
        assert bloom_center_range(T, L) == expected

    def test_bloom_center_range_needs_more_timepoints_than_window(self):
        with pytest.raises(ValueError, match="more than L timepoints"):
            bloom_center_range(9, 9)

    def test_short_series_keeps_bloom_windows_inside(self):
        """
        With L < T < 2L the centers are drawn from the narrowed range and every window fits the series.
        """
        T, L = 12, 9
        rng = make_rng(5, 'dictionary')
        centers = [center for _ in range(200) for center in sample_bloom_centers(rng, T, 2.0, L)]
        assert min(centers) >= 4 and max(centers) <= 7

    def test_bloom_only_dictionary_on_short_series(self):
        config = SimConfig(n_subjects=20, n_timepoints=12, n_species=4, n_communities=2, n_clusters=2,
            n_disease_clusters=1, kind_probs=(0.0, 0.0, 0.0, 1.0))
        dictionary = sample_dictionary(make_rng(0, 'dictionary'), config)
        assert np.all(dictionary.kinds == TrajectoryKind.BLOOM)
        np.testing.assert_allclose(dictionary.entries.sum(axis=1), 12, rtol=1e-9)
        assert all(4 <= center <= 7 for _, _, center in dictionary.bloom_centers)

class TestSampleSubjects:
    """
    Tests for mixture weights, labels, concepts and the train/val split.
    """

    def test_single_community(self):
        config = SimConfig(n_subjects=30, n_timepoints=20, n_species=5, n_communities=1, n_clusters=4,
            n_disease_clusters=2)
        dictionary = sample_dictionary(make_rng(0, 'dictionary'), config)
        dataset = sample_subjects(make_rng(0, 'subjects'), dictionary, config)
        np.testing.assert_array_equal(dataset.theta, np.ones((30, 1)))
        np.testing.assert_allclose(dataset.X, np.broadcast_to(dictionary.entries[0], dataset.X.shape))
        assert np.all(dataset.cluster_id == 0)
        assert len(np.unique(dataset.y)) == 1

    def test_theta_rows_on_simplex(self, small_dataset):
        np.testing.assert_allclose(small_dataset.theta.sum(axis=1), 1.0, atol=1e-9)
        assert np.all(small_dataset.theta >= 0)

    def test_mixture_identity(self, small_dataset):
        assert small_dataset.X.min() >= 0
        np.testing.assert_allclose(small_dataset.reconstruct(), small_dataset.X, rtol=1e-6)

    def test_concepts_are_thresholded_theta(self, small_dataset):
        expected = (small_dataset.theta > small_dataset.config.concept_threshold).astype(np.int8)
        np.testing.assert_array_equal(small_dataset.concepts, expected)

    def test_labels_are_a_function_of_cluster(self, small_dataset):
        for cluster in np.unique(small_dataset.cluster_id):
            labels = small_dataset.y[small_dataset.cluster_id == cluster]
            assert len(np.unique(labels)) == 1
        disease = set(small_dataset.ground_truth.disease_clusters)
        np.testing.assert_array_equal(small_dataset.y, np.isin(small_dataset.cluster_id, list(disease)))

    def test_split_proportions(self, small_dataset):
        assert small_dataset.train_mask.sum() == 90
        assert small_dataset.val_mask.sum() == 30
        assert np.all(small_dataset.train_mask ^ small_dataset.val_mask)

    def test_rejects_mismatched_dictionary(self, small_config):
        other = SimConfig(n_communities=3, n_species=12, n_timepoints=30)
        dictionary = sample_dictionary(make_rng(0, 'dictionary'), other)
        with pytest.raises(ValueError, match="communities"):
            sample_subjects(make_rng(0, 'subjects'), dictionary, small_config)

    def test_reproducible_generation(self, small_config):
        first, second = simulate(small_config), simulate(small_config)
        assert first.X.tobytes() == second.X.tobytes()
        np.testing.assert_array_equal(first.y, second.y)
        np.testing.assert_array_equal(first.split, second.split)

    def test_different_seed_changes_data(self, small_config):
        other = simulate(small_config.model_copy(update={'seed': 12}))
        assert not np.array_equal(simulate(small_config).X, other.X)

    def test_subset_keeps_truth_aligned(self, small_dataset):
        index = np.array([5, 1, 7])
        subset = small_dataset.subset(index)
        np.testing.assert_array_equal(subset.theta, small_dataset.theta[index])
        np.testing.assert_array_equal(subset.X, small_dataset.X[index])
        np.testing.assert_allclose(subset.reconstruct(), subset.X, rtol=1e-6)

    @pytest.mark.slow
    def test_default_class_balance(self):
        dataset = simulate(SimConfig(n_subjects=500, seed=0))
        assert 0.3 <= dataset.y.mean() <= 0.7
