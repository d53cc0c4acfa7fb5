# tests/unit/simulation/test_simulation_views.py

import pytest
import json
import hashlib
import numpy as np
from pydantic import BaseModel, ValidationError
from glassbox.simulation.views import SimConfig, TrajectoryDictionary, GroundTruth, TrajectoryKind
from glassbox.simulation.utils import derive_seed, make_rng, config_digest

class TestSimConfig:
    """
    Tests for SimConfig defaults and validation.
    """

    def test_defaults(self):
        config = SimConfig()
        assert (config.n_timepoints, config.n_species, config.n_communities) == (50, 144, 25)
        assert config.lambda_u == 0.3
        assert (config.tukey_bandwidth, config.tukey_window) == (0.9, 9)
        assert (config.n_clusters, config.n_disease_clusters) == (24, 12)
        assert config.kind_probs == (0.7, 0.1, 0.1, 0.1)

    @pytest.mark.parametrize(
        "overrides, message",
        [
            ({'kind_probs': (0.5, 0.1, 0.1, 0.1)}, "sum to 1"),
            ({'n_disease_clusters': 30}, "exceeds"),
            ({'tukey_window': 8}, "odd"),
            ({'n_timepoints': 9}, "exceed"),
        ],
    )
    def test_invalid_configs(self, overrides, message):
        with pytest.raises(ValidationError, match=message):
            SimConfig(**overrides)

    def test_non_positive_counts_rejected(self):
        with pytest.raises(ValidationError):
            SimConfig(n_subjects=0)

    def test_unknown_keys_rejected(self):
        with pytest.raises(ValidationError):
            SimConfig(n_subject=10)

    def test_config_hash_tracks_values(self):
        assert SimConfig().config_hash() == SimConfig().config_hash()
        assert SimConfig(seed=1).config_hash() != SimConfig(seed=2).config_hash()

    def test_config_hash_is_sorted_key_canonical_json(self):
        config = SimConfig(n_subjects=30, seed=4)
        document = json.dumps(config.model_dump(mode='json'), sort_keys=True, separators=(',', ':'))
        assert config.config_hash() == hashlib.sha256(document.encode('utf-8')).hexdigest()

    def test_config_digest_ignores_field_order(self):
        class Forward(BaseModel):
            a: int = 1
            b: int = 2

        class Backward(BaseModel):
            b: int = 2
            a: int = 1

        assert config_digest(Forward()) == config_digest(Backward())

class TestSeedDerivation:
    """
    Tests for the purpose-keyed random streams.
    """

    def test_seed_is_stable(self):
        assert derive_seed(7, 'dictionary') == derive_seed(7, 'dictionary')
        assert 0 <= derive_seed(7, 'dictionary') < 2**64

    def test_purposes_are_independent(self):
        assert derive_seed(7, 'dictionary') != derive_seed(7, 'subjects')

    def test_streams_reproduce(self):
        np.testing.assert_array_equal(make_rng(3, 'x').random(5), make_rng(3, 'x').random(5))

class TestGroundTruth:
    """
    Tests for the truth cell mask used by faithfulness scoring.
    """

    @pytest.fixture
    def truth(self):
        T, D = 20, 4
        kinds = np.array([
            [TrajectoryKind.NOISE, TrajectoryKind.INCREASE, TrajectoryKind.BLOOM, TrajectoryKind.NOISE],
            [TrajectoryKind.DECREASE, TrajectoryKind.NOISE, TrajectoryKind.NOISE, TrajectoryKind.BLOOM],
        ], dtype=np.int8)
        dictionary = TrajectoryDictionary(entries=np.zeros((2, T, D)), kinds=kinds,
            bloom_centers=[(0, 2, 10), (1, 3, 12)])
        theta = np.array([[0.9, 0.1], [0.05, 0.95]])
        return GroundTruth(theta=theta, dictionary=dictionary, cluster_id=np.array([0, 1]), disease_clusters=(1,),
            tukey_window=5, concept_threshold=0.1)

    def test_mask_of_first_subject(self, truth):
        mask = truth.truth_mask(0)
        assert mask[:, 1].all()
        assert mask[8:13, 2].all() and not mask[:8, 2].any() and not mask[13:, 2].any()
        assert not mask[:, 0].any() and not mask[:, 3].any()

    def test_mask_of_second_subject(self, truth):
        mask = truth.truth_mask(1)
        assert mask[:, 0].all()
        assert mask[10:15, 3].sum() == 5
        assert not mask[:, 1].any() and not mask[:, 2].any()

class TestDatasetSummary:
    """
    Tests for the summary table printed after simulation.
    """

    def test_summary_reports_dimensions(self):
        from glassbox.simulation import simulate
        dataset = simulate(SimConfig(n_subjects=40, n_timepoints=20, n_species=6, n_communities=3, n_clusters=4,
            n_disease_clusters=2))
        summary = dataset.summary()
        assert (summary.n_subjects, summary.n_timepoints, summary.n_species, summary.n_communities) == (40, 20, 6, 3)
        assert sum(summary.kind_counts.values()) == 18
        assert 'Species (D)' in summary.to_string()
