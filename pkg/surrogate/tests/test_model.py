"""Unit tests for attention, the encoder blocks, and the surrogate model."""

import pytest
import torch

import surrogate as sg


def tiny_config(**overrides):
    base = dict(encoder_layers=2, heads=2, model_width=16)
    base.update(overrides)
    return sg.SurrogateConfig(**base)


class TestAttention:
    """Scaled dot-product attention oracles."""

    def test_uniform_scores_average_values(self):
        """Zero scores weight every value equally: the column mean of V."""
        torch.manual_seed(0)
        queries = torch.zeros(4, 8)
        keys = torch.randn(6, 8)
        values = torch.randn(6, 5)
        out = sg.attention(queries, keys, values)
        expected = values.mean(dim=0).expand(4, 5)
        assert torch.allclose(out, expected, atol=1e-6)

    def test_dominant_score_selects_value_row(self):
        """A query aligned hard with one key returns that key's value row."""
        keys = torch.eye(4)
        queries = 80.0 * keys[2:3]
        values = torch.randn(4, 3)
        out = sg.attention(queries, keys, values)
        assert torch.allclose(out[0], values[2], atol=1e-6)

    def test_weight_rows_sum_to_one(self):
        """Softmax rows are nonnegative and normalize within 1e-6."""
        torch.manual_seed(1)
        weights = sg.attention_weights(torch.randn(7, 9), torch.randn(11, 9))
        assert weights.shape == (7, 11)
        assert torch.all(weights >= 0)
        assert torch.allclose(weights.sum(dim=-1), torch.ones(7), atol=1e-6)

    def test_scale_is_sqrt_feature_size(self):
        """Scores divide by sqrt(d_k) before the softmax."""
        torch.manual_seed(2)
        queries = torch.randn(3, 4)
        keys = torch.randn(5, 4)
        manual = torch.softmax(queries @ keys.T / 2.0, dim=-1)
        assert torch.allclose(sg.attention_weights(queries, keys), manual,
                              atol=1e-7)

    def test_feature_mismatch_rejected(self):
        """Queries and keys with different feature sizes are an error."""
        with pytest.raises(sg.ValidationError, match="feature"):
            sg.attention(torch.zeros(2, 4), torch.zeros(2, 5),
                         torch.zeros(2, 3))

    def test_token_mismatch_rejected(self):
        """Keys and values must pair up one token each."""
        with pytest.raises(sg.ValidationError, match="token"):
            sg.attention(torch.zeros(2, 4), torch.zeros(3, 4),
                         torch.zeros(2, 3))


class TestMultiHead:
    """Functional multi-head attention against plain attention."""

    def test_single_identity_head_matches_attention(self):
        """One head with identity projections reduces to plain attention."""
        torch.manual_seed(3)
        q = torch.randn(6, 8)
        k = torch.randn(6, 8)
        v = torch.randn(6, 8)
        eye = torch.eye(8)
        out = sg.multi_head(q, k, v, [(eye, eye, eye)], eye)
        assert torch.allclose(out, sg.attention(q, k, v), atol=1e-6)

    def test_head_permutation_with_permuted_output_blocks(self):
        """Reordering heads and their output-weight blocks changes nothing."""
        torch.manual_seed(4)
        heads, d_head = 3, 4
        q = torch.randn(5, 8)
        k = torch.randn(5, 8)
        v = torch.randn(5, 8)
        head_weights = [tuple(torch.randn(8, d_head) for _ in range(3))
                        for _ in range(heads)]
        output = torch.randn(heads * d_head, 8)
        base = sg.multi_head(q, k, v, head_weights, output)
        perm = [2, 0, 1]
        permuted_heads = [head_weights[i] for i in perm]
        permuted_output = torch.cat(
            [output[d_head * i:d_head * (i + 1)] for i in perm], dim=0)
        swapped = sg.multi_head(q, k, v, permuted_heads, permuted_output)
        assert torch.allclose(swapped, base, atol=1e-6)

    def test_no_heads_rejected(self):
        """An empty head list is an error."""
        with pytest.raises(sg.ValidationError, match="head"):
            sg.multi_head(torch.zeros(2, 4), torch.zeros(2, 4),
                          torch.zeros(2, 4), [], torch.eye(4))

    def test_module_matches_functional_form(self):
        """The fused module equals multi_head on its sliced per-head weights."""
        torch.manual_seed(5)
        block = sg.MultiHeadAttention(width=16, heads=4)
        x = torch.randn(1, 6, 16)
        with torch.no_grad():
            out = block(x)[0]
            expected = sg.multi_head(x[0], x[0], x[0], block.head_weights(),
                                     block.project_out.weight.T)
        assert torch.allclose(out, expected, atol=1e-5)

    def test_indivisible_width_rejected(self):
        """Width not divisible by the head count is a config error."""
        with pytest.raises(sg.ValidationError, match="divisible"):
            sg.MultiHeadAttention(width=10, heads=3)


class TestLivgSurrogate:
    """Shape and state behavior of the full model."""

    def test_forward_shape(self):
        """(batch, 64, 64) tokens map to (batch, 15, 32) predictions."""
        torch.manual_seed(6)
        model = sg.LivgSurrogate(tiny_config())
        assert model(torch.randn(3, 64, 64)).shape == (3, 15, 32)

    def test_wrong_token_shape_rejected(self):
        """Token tensors must match the config's token grid."""
        model = sg.LivgSurrogate(tiny_config())
        with pytest.raises(sg.ValidationError, match="shape"):
            model(torch.randn(3, 32, 64))

    def test_starts_unfitted(self):
        """A fresh model reports untrained until marked."""
        model = sg.LivgSurrogate(tiny_config())
        assert not model.is_fitted
        model.mark_fitted()
        assert model.is_fitted

    def test_deterministic_construction(self):
        """The same torch seed builds identical parameters."""
        torch.manual_seed(7)
        first = sg.LivgSurrogate(tiny_config())
        torch.manual_seed(7)
        second = sg.LivgSurrogate(tiny_config())
        for a, b in zip(first.parameters(), second.parameters()):
            assert torch.equal(a, b)

    def test_positional_embeddings_matter(self):
        """Permuting tokens changes the prediction (positions are learned)."""
        torch.manual_seed(8)
        model = sg.LivgSurrogate(tiny_config())
        x = torch.randn(1, 64, 64)
        flipped = torch.flip(x, dims=(1,))
        with torch.no_grad():
            assert not torch.allclose(model(x), model(flipped), atol=1e-6)
