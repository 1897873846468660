"""Single-head cross-attention with an analytic backward pass.

The forward pass computes ``softmax(Q K^T / sqrt(d)) V`` where Q is the
projected query source and K, V are projections of a shared key/value
source.  The backward pass returns gradients for all three projection
weights and for both input matrices, so two attention stages can be
chained and differentiated end to end.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError
from .ops import as_tensor, check_finite, matmul, softmax_rows


@dataclass(frozen=True)
class LinearProjection:
    """A named learnable weight matrix of shape [d_in x d_out]."""

    name: str
    weight: np.ndarray

    def __post_init__(self):
        w = as_tensor(self.weight)
        if w.ndim != 2:
            raise ShapeError(f"projection {self.name}: weight must be 2-D, got {w.shape}")
        object.__setattr__(self, "weight", w)

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = as_tensor(x)
        if x.ndim != 2 or x.shape[1] != self.weight.shape[0]:
            raise ShapeError(
                f"projection {self.name}: input {x.shape} incompatible with "
                f"weight {self.weight.shape}"
            )
        return matmul(x, self.weight)


@dataclass(frozen=True)
class AttentionProjections:
    """Query/key/value projections of one attention stage."""

    query: LinearProjection
    key: LinearProjection
    value: LinearProjection


@dataclass
class AttentionCache:
    """Forward intermediates needed by the backward pass."""

    query_src: np.ndarray
    kv_src: np.ndarray
    proj: AttentionProjections
    q: np.ndarray
    k: np.ndarray
    v: np.ndarray
    weights: np.ndarray  # row-stochastic attention matrix
    scale: float


@dataclass
class AttentionGradients:
    """Gradients of a scalar loss with respect to one attention stage."""

    d_query_weight: np.ndarray
    d_key_weight: np.ndarray
    d_value_weight: np.ndarray
    d_query_src: np.ndarray
    d_kv_src: np.ndarray


def cross_attention_forward(
    query_src: np.ndarray,
    kv_src: np.ndarray,
    proj: AttentionProjections,
) -> tuple[np.ndarray, AttentionCache]:
    """Run one attention stage, returning output and cached intermediates."""
    query_src = as_tensor(query_src)
    kv_src = as_tensor(kv_src)
    q = proj.query.apply(query_src)
    k = proj.key.apply(kv_src)
    v = proj.value.apply(kv_src)
    d = q.shape[1]
    if d == 0:
        raise ShapeError("cross_attention: projected feature dimension is 0")
    if k.shape[1] != d:
        raise ShapeError(
            f"cross_attention: projected query dim {q.shape} and key dim {k.shape} disagree"
        )
    scale = 1.0 / np.sqrt(float(d))
    scores = check_finite(q @ k.T * scale, "cross_attention scores")
    weights = softmax_rows(scores)
    out = check_finite(weights @ v, "cross_attention output")
    cache = AttentionCache(query_src, kv_src, proj, q, k, v, weights, scale)
    return out, cache


def cross_attention(
    query_src: np.ndarray,
    kv_src: np.ndarray,
    proj: AttentionProjections,
) -> np.ndarray:
    """Forward-only convenience wrapper around :func:`cross_attention_forward`."""
    out, _ = cross_attention_forward(query_src, kv_src, proj)
    return out


def cross_attention_backward(cache: AttentionCache, d_out: np.ndarray) -> AttentionGradients:
    """Backpropagate ``d_out`` through one attention stage.

    Returns gradients for the three projection weights and for both input
    matrices; the latter allow chaining through a preceding stage.
    """
    d_out = as_tensor(d_out)
    a = cache.weights
    d_weights = d_out @ cache.v.T
    d_v = a.T @ d_out
    # softmax rows: dS = A * (dA - rowsum(dA * A))
    d_scores = a * (d_weights - np.sum(d_weights * a, axis=1, keepdims=True))
    d_q = d_scores @ cache.k * cache.scale
    d_k = d_scores.T @ cache.q * cache.scale
    grads = AttentionGradients(
        d_query_weight=cache.query_src.T @ d_q,
        d_key_weight=cache.kv_src.T @ d_k,
        d_value_weight=cache.kv_src.T @ d_v,
        d_query_src=d_q @ cache.proj.query.weight.T,
        d_kv_src=d_k @ cache.proj.key.weight.T + d_v @ cache.proj.value.weight.T,
    )
    for field in (grads.d_query_weight, grads.d_key_weight, grads.d_value_weight):
        check_finite(field, "cross_attention backward")
    return grads
