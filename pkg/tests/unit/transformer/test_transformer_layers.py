# tests/unit/transformer/test_transformer_layers.py

import pytest
import numpy as np
from glassbox.autodiff import Tensor, ops, gradcheck, default_dtype, no_grad
from glassbox.transformer import self_attention, build_model, forward_classifier, forward_cbm, TransformerConfig
from glassbox.transformer.layers import MultiHeadAttention

@pytest.fixture
def tiny_config():
    return TransformerConfig(n_embd=6, n_positions=5, n_layer=2, n_head=2, n_concept=3, seed=1)

class TestSelfAttention:
    """
    Tests for single- and multi-head attention.
    """

    def test_single_token_returns_value_projection(self):
        rng = np.random.default_rng(0)
        X, W_q, W_k, W_v = rng.standard_normal((1, 4)), rng.standard_normal((4, 3)), rng.standard_normal((4, 3)), rng.standard_normal((4, 2))
        np.testing.assert_allclose(self_attention(X, W_q, W_k, W_v).data, X @ W_v, rtol=1e-5)

    def test_zero_query_gives_uniform_attention(self):
        rng = np.random.default_rng(1)
        X, W_k, W_v = rng.standard_normal((5, 4)), rng.standard_normal((4, 3)), rng.standard_normal((4, 2))
        output = self_attention(X, np.zeros((4, 3)), W_k, W_v).data
        values = X @ W_v
        np.testing.assert_allclose(output, np.tile(values.mean(axis=0), (5, 1)), rtol=1e-5, atol=1e-6)

    def test_zero_query_under_causal_mask_gives_prefix_means(self):
        rng = np.random.default_rng(2)
        X, W_k, W_v = rng.standard_normal((5, 4)), rng.standard_normal((4, 3)), rng.standard_normal((4, 2))
        mask = np.triu(np.ones((5, 5), dtype=bool), k=1)
        output = self_attention(X, np.zeros((4, 3)), W_k, W_v, mask).data
        values = X @ W_v
        expected = np.cumsum(values, axis=0) / np.arange(1, 6)[:, None]
        np.testing.assert_allclose(output, expected, rtol=1e-5, atol=1e-6)

    @pytest.mark.parametrize("causal", [True, False])
    def test_attention_rows_sum_to_one(self, causal):
        rng = np.random.default_rng(3)
        attention = MultiHeadAttention(8, 2, rng, causal=causal)
        with no_grad():
            _, weights = attention.attend(Tensor(rng.standard_normal((3, 7, 8))))
        assert weights.shape == (3, 2, 7, 7)
        np.testing.assert_allclose(weights.data.sum(axis=-1), 1.0, atol=1e-5)
        if causal:
            assert np.all(weights.data[..., np.triu_indices(7, k=1)[0], np.triu_indices(7, k=1)[1]] == 0)

    def test_mismatched_weights(self):
        with pytest.raises(ValueError, match="must match"):
            self_attention(np.ones((2, 4)), np.ones((4, 3)), np.ones((4, 2)), np.ones((4, 2)))

class TestForwardClassifier:
    """
    Tests for the plain transformer forward pass.
    """

    def test_zero_head_gives_half(self, tiny_config):
        model = build_model(tiny_config)
        model.head.weight.data[...] = 0.0
        model.head.bias.data[...] = 0.0
        with no_grad():
            logits = forward_classifier(model, np.random.default_rng(0).standard_normal((4, 5, 6)))
        np.testing.assert_array_equal(logits.data, 0.0)

    def test_batch_permutation_equivariance(self, tiny_config):
        model = build_model(tiny_config)
        X = np.random.default_rng(1).standard_normal((4, 5, 6))
        order = np.array([2, 0, 3, 1])
        with no_grad():
            logits = forward_classifier(model, X).data
            permuted = forward_classifier(model, X[order]).data
        np.testing.assert_allclose(permuted, logits[order], rtol=1e-5)

    def test_too_long_sequence(self, tiny_config):
        with pytest.raises(ValueError, match="exceeds n_positions"):
            forward_classifier(build_model(tiny_config), np.zeros((1, 6, 6)))

    def test_wrong_token_width(self, tiny_config):
        with pytest.raises(ValueError, match="tokens"):
            forward_classifier(build_model(tiny_config), np.zeros((1, 5, 7)))

    def test_causal_prefix_invariance(self, tiny_config):
        model = build_model(tiny_config)
        rng = np.random.default_rng(4)
        X = rng.standard_normal((1, 5, 6))
        changed = X.copy()
        changed[0, 3:] = rng.standard_normal((2, 6))
        with no_grad():
            first = model.encoder(Tensor(X)).data
            second = model.encoder(Tensor(changed)).data
        np.testing.assert_allclose(first[0, :3], second[0, :3], rtol=1e-5, atol=1e-6)
        assert not np.allclose(first[0, 3:], second[0, 3:])

    def test_input_gradient_matches_finite_differences(self, tiny_config):
        with default_dtype(np.float64):
            model = build_model(tiny_config.model_copy(update={'n_layer': 1}))
            for block in model.encoder.blocks:
                block.mlp.fc.bias.data[...] = 0.5
            x = Tensor(np.random.default_rng(5).standard_normal((2, 4, 6)), requires_grad=True)
            report = gradcheck(lambda x: ops.binary_cross_entropy(forward_classifier(model, x), np.array([1.0, 0.0])), [x])
        assert report.passed, report.max_rel_error

class TestConceptBottleneck:
    """
    Tests for the concept-bottleneck forward pass.
    """

    def test_default_concept_width(self):
        model = build_model(TransformerConfig(n_layer=1), mode='cbm')
        assert model.concept.weight.shape == (50 * 144, 25)

    def test_class_logits_depend_only_on_concepts(self, tiny_config):
        model = build_model(tiny_config, mode='cbm')
        with no_grad():
            concepts, logits = forward_cbm(model, np.random.default_rng(0).standard_normal((3, 5, 6)))
            replayed = model.head(Tensor(concepts.data))
        np.testing.assert_array_equal(replayed.data, logits.data)

    def test_sequence_length_must_match_positions(self, tiny_config):
        with pytest.raises(ValueError, match="T=5"):
            forward_cbm(build_model(tiny_config, mode='cbm'), np.zeros((1, 4, 6)))

    def test_unknown_mode(self, tiny_config):
        with pytest.raises(ValueError, match="Unknown transformer mode"):
            build_model(tiny_config, mode='rnn')

class TestModule:
    """
    Tests for parameter discovery and state round trips.
    """

    def test_named_parameters(self, tiny_config):
        names = [name for name, _ in build_model(tiny_config).named_parameters()]
        assert names[0] == 'encoder.position'
        assert 'encoder.blocks.1.attn.query.weight' in names
        assert names[-1] == 'head.bias'
        assert len(names) == len(set(names))

    def test_state_round_trip(self, tiny_config):
        source = build_model(tiny_config)
        target = build_model(tiny_config.model_copy(update={'seed': 9}))
        target.load_state_dict(source.state_dict())
        for (_, a), (_, b) in zip(source.named_parameters(), target.named_parameters()):
            np.testing.assert_array_equal(a.data, b.data)

    def test_state_mismatch(self, tiny_config):
        state = build_model(tiny_config).state_dict()
        state.pop('head.bias')
        with pytest.raises(ValueError, match="missing"):
            build_model(tiny_config).load_state_dict(state)

class TestTransformerConfig:
    """
    Tests for configuration validation.
    """

    def test_defaults(self):
        config = TransformerConfig()
        assert (config.n_embd, config.n_positions, config.n_layer, config.n_head, config.n_concept) == (144, 50, 6, 4, 25)
        assert config.head_dim == 36
        assert TransformerConfig.desk().n_layer == 2

    def test_heads_must_divide_width(self):
        with pytest.raises(ValueError, match="divisible"):
            TransformerConfig(n_embd=10, n_head=4)

    def test_unknown_key(self):
        with pytest.raises(ValueError):
            TransformerConfig(dropout=0.1)
