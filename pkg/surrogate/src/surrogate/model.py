"""Encoder-regression model, from scaled dot-product attention to the pooled head."""

import math

import torch
from torch import nn

from ._errors import require
from .config import TARGET_COLS, TARGET_ROWS


def attention_weights(queries, keys):
    """Softmax-normalized scaled dot-product scores, one row per query.

    Rows sum to one: a query with identical scores against every key mixes
    all values uniformly, while one dominant score selects its value row.
    """
    require(queries.shape[-1] == keys.shape[-1], "attention",
            "queries and keys must share the feature size")
    scores = queries @ keys.transpose(-2, -1) / math.sqrt(keys.shape[-1])
    return torch.softmax(scores, dim=-1)


def attention(queries, keys, values):
    """Scaled dot-product attention ``softmax(Q K^T / sqrt(d_k)) V``.

    Parameters
    ----------
    queries : tensor, shape (..., t_q, d_k)
    keys : tensor, shape (..., t_k, d_k)
    values : tensor, shape (..., t_k, d_v)

    Returns
    -------
    tensor, shape (..., t_q, d_v)
    """
    require(keys.shape[-2] == values.shape[-2], "attention",
            "keys and values must have matching token counts")
    return attention_weights(queries, keys) @ values


def multi_head(queries, keys, values, head_weights, output_weight):
    """Multi-head attention from explicit per-head projection matrices.

    Each entry of `head_weights` is a ``(w_q, w_k, w_v)`` triple projecting
    the inputs into that head's subspace; the heads run scaled dot-product
    attention independently, are concatenated feature-wise in order, and the
    concatenation is mapped back through `output_weight`.

    Parameters
    ----------
    head_weights : sequence of (tensor, tensor, tensor)
    output_weight : tensor, shape (heads * d_v, d_model)
    """
    require(len(head_weights) >= 1, "multi_head", "needs at least one head")
    heads = [attention(queries @ w_q, keys @ w_k, values @ w_v)
             for w_q, w_k, w_v in head_weights]
    return torch.cat(heads, dim=-1) @ output_weight


class MultiHeadAttention(nn.Module):
    """Self-attention with fused head projections and no projection biases."""

    def __init__(self, width, heads):
        super().__init__()
        require(width % heads == 0, "model_width", "must be divisible by heads")
        self.width = width
        self.heads = heads
        self.head_dim = width // heads
        self.project_q = nn.Linear(width, width, bias=False)
        self.project_k = nn.Linear(width, width, bias=False)
        self.project_v = nn.Linear(width, width, bias=False)
        self.project_out = nn.Linear(width, width, bias=False)

    def head_weights(self):
        """Per-head ``(w_q, w_k, w_v)`` views matching :func:`multi_head`."""
        splits = []
        for index in range(self.heads):
            cols = slice(index * self.head_dim, (index + 1) * self.head_dim)
            splits.append((self.project_q.weight.T[:, cols],
                           self.project_k.weight.T[:, cols],
                           self.project_v.weight.T[:, cols]))
        return splits

    def _split(self, x):
        batch, tokens, _ = x.shape
        return x.view(batch, tokens, self.heads, self.head_dim).transpose(1, 2)

    def forward(self, x):
        batch, tokens, _ = x.shape
        mixed = attention(self._split(self.project_q(x)),
                          self._split(self.project_k(x)),
                          self._split(self.project_v(x)))
        merged = mixed.transpose(1, 2).reshape(batch, tokens, self.width)
        return self.project_out(merged)


class EncoderLayer(nn.Module):
    """Pre-norm encoder block: self-attention then a ReLU feed-forward."""

    def __init__(self, width, heads):
        super().__init__()
        self.norm_attn = nn.LayerNorm(width)
        self.attend = MultiHeadAttention(width, heads)
        self.norm_ffn = nn.LayerNorm(width)
        self.ffn = nn.Sequential(nn.Linear(width, 4 * width), nn.ReLU(),
                                 nn.Linear(4 * width, width))

    def forward(self, x):
        x = x + self.attend(self.norm_attn(x))
        return x + self.ffn(self.norm_ffn(x))


class LivgSurrogate(nn.Module):
    """Maps tokenized weight matrices to padded basis-row predictions.

    Forward input is a ``(batch, 64, 64)`` token tensor from
    :func:`surrogate.tokens.patchify`; output is ``(batch, 15, 32)`` padded
    predictions (real halves then imaginary halves, rows beyond the basis
    rank trained toward zero). Tokens are embedded, offset by learned
    positional embeddings, run through the encoder stack, mean-pooled, and
    mapped to the flat target by a linear head.
    """

    def __init__(self, config):
        super().__init__()
        self.config = config
        self.embed = nn.Linear(config.token_length, config.model_width)
        self.positions = nn.Parameter(
            0.02 * torch.randn(config.token_count, config.model_width))
        self.layers = nn.ModuleList(
            EncoderLayer(config.model_width, config.heads)
            for _ in range(config.encoder_layers))
        self.norm = nn.LayerNorm(config.model_width)
        self.head = nn.Linear(config.model_width, TARGET_ROWS * TARGET_COLS)
        self.register_buffer("fitted", torch.zeros((), dtype=torch.bool))

    @property
    def is_fitted(self):
        """True once :func:`surrogate.training.train` has finished on this model."""
        return bool(self.fitted)

    def mark_fitted(self):
        """Record that training completed (persists through checkpoints)."""
        self.fitted.fill_(True)

    def forward(self, tokens):
        expected = (self.config.token_count, self.config.token_length)
        require(tokens.dim() == 3 and tuple(tokens.shape[-2:]) == expected,
                "tokens", f"must have shape (batch, {expected[0]}, {expected[1]})")
        h = self.embed(tokens) + self.positions
        for layer in self.layers:
            h = layer(h)
        pooled = self.norm(h).mean(dim=-2)
        return self.head(pooled).view(-1, TARGET_ROWS, TARGET_COLS)
