"""
Nonlinearities, normalisation and loss functions over DiffArray.
"""
from typing import Optional, Sequence

import numpy as np

from hierarchynet.modules.numeric.diffArray import (
    ArrayLike, DiffArray, _accumulate, _make, as_diff,
)
from hierarchynet.utils.errors import ShapeMismatch


def softmax(x: ArrayLike, axis: int = -1, mask: Optional[np.ndarray] = None) -> DiffArray:
    """
    Softmax along `axis`. `mask` (broadcastable boolean, True = keep) zeroes the
    excluded positions; a slice with every position masked yields zeros.
    """
    x = as_diff(x)
    logits = x.values
    if mask is not None:
        mask = np.broadcast_to(np.asarray(mask, dtype=bool), logits.shape)
        logits = np.where(mask, logits, -np.inf)
    peak = np.max(logits, axis=axis, keepdims=True)
    peak = np.where(np.isfinite(peak), peak, 0.0)
    e = np.exp(logits - peak)
    total = np.sum(e, axis=axis, keepdims=True)
    y = e / np.where(total > 0, total, 1.0)

    def backward(g):
        inner = np.sum(g * y, axis=axis, keepdims=True)
        _accumulate(x, y * (g - inner))

    return _make(y, (x,), backward, "softmax")


def sigmoid(x: ArrayLike) -> DiffArray:
    x = as_diff(x)
    e = np.exp(-np.abs(x.values))
    y = np.where(x.values >= 0, 1.0 / (1.0 + e), e / (1.0 + e))

    def backward(g):
        _accumulate(x, g * y * (1.0 - y))

    return _make(y, (x,), backward, "sigmoid")


def tanh(x: ArrayLike) -> DiffArray:
    x = as_diff(x)
    y = np.tanh(x.values)

    def backward(g):
        _accumulate(x, g * (1.0 - y * y))

    return _make(y, (x,), backward, "tanh")


def relu(x: ArrayLike) -> DiffArray:
    x = as_diff(x)
    positive = x.values > 0

    def backward(g):
        _accumulate(x, g * positive)

    return _make(np.where(positive, x.values, 0.0), (x,), backward, "relu")


def layer_norm(x: ArrayLike, gamma: Optional[ArrayLike] = None, beta: Optional[ArrayLike] = None,
               eps: float = 1e-5) -> DiffArray:
    """Normalise over the last axis, then apply the optional affine gamma/beta."""
    x = as_diff(x)
    width = x.shape[-1]
    gamma = as_diff(gamma) if gamma is not None else None
    beta = as_diff(beta) if beta is not None else None
    for p in (gamma, beta):
        if p is not None and p.shape != (width,):
            raise ShapeMismatch("layer_norm", p.shape, (width,))
    mu = x.values.mean(axis=-1, keepdims=True)
    centered = x.values - mu
    var = (centered * centered).mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = centered * inv_std
    y = xhat
    if gamma is not None:
        y = y * gamma.values
    if beta is not None:
        y = y + beta.values
    parents = tuple(p for p in (x, gamma, beta) if p is not None)

    def backward(g):
        lead = tuple(range(g.ndim - 1))
        if gamma is not None:
            _accumulate(gamma, np.sum(g * xhat, axis=lead))
            dxhat = g * gamma.values
        else:
            dxhat = g
        if beta is not None:
            _accumulate(beta, np.sum(g, axis=lead))
        dx = inv_std * (dxhat - dxhat.mean(axis=-1, keepdims=True)
                        - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True))
        _accumulate(x, dx)

    return _make(y, parents, backward, "layer_norm")


def embedding_lookup(table: DiffArray, ids: Sequence[int]) -> DiffArray:
    """Rows of `table` for each id; gradients scatter-add into the table."""
    ids = np.asarray(ids, dtype=np.int64)
    if table.ndim != 2:
        raise ShapeMismatch("embedding_lookup", table.shape, ("vocab", "width"))
    if ids.size and (ids.min() < 0 or ids.max() >= table.shape[0]):
        raise ShapeMismatch("embedding_lookup", (int(ids.max()),), (table.shape[0],))

    def backward(g):
        full = np.zeros_like(table.values)
        np.add.at(full, ids, g)
        _accumulate(table, full)

    return _make(table.values[ids], (table,), backward, "embedding")


def max_pool(x: ArrayLike, axis: int = 0) -> DiffArray:
    """Max along `axis`; the gradient goes to the first maximal entry."""
    x = as_diff(x)
    if x.shape[axis] == 0:
        raise ShapeMismatch("max_pool", x.shape, "non-empty pooling axis")
    arg = np.argmax(x.values, axis=axis)
    y = np.take_along_axis(x.values, np.expand_dims(arg, axis), axis=axis).squeeze(axis)

    def backward(g):
        full = np.zeros_like(x.values)
        np.put_along_axis(full, np.expand_dims(arg, axis), np.expand_dims(g, axis), axis=axis)
        _accumulate(x, full)

    return _make(y, (x,), backward, "max_pool")


def cross_entropy(logits: ArrayLike, targets: Sequence[int], ignore_index: Optional[int] = None) -> DiffArray:
    """
    Mean token-level negative log-likelihood of `targets` under row-wise softmax of
    `logits` [T x V]. Positions whose target equals `ignore_index` do not count.
    """
    logits = as_diff(logits)
    targets = np.asarray(targets, dtype=np.int64)
    if logits.ndim != 2 or targets.shape != (logits.shape[0],):
        raise ShapeMismatch("cross_entropy", targets.shape, (logits.shape[0] if logits.ndim else None,))
    keep = np.ones(targets.shape, dtype=bool) if ignore_index is None else targets != ignore_index
    count = max(int(keep.sum()), 1)
    v = logits.values
    peak = v.max(axis=1, keepdims=True)
    shifted = v - peak
    log_z = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_probs = shifted - log_z
    rows = np.arange(targets.shape[0])
    safe_targets = np.where(keep, targets, 0)
    picked = log_probs[rows, safe_targets]
    loss = -np.sum(np.where(keep, picked, 0.0)) / count

    def backward(g):
        probs = np.exp(log_probs)
        probs[rows, safe_targets] -= 1.0
        probs *= keep[:, None]
        _accumulate(logits, probs * (float(g) / count))

    return _make(np.asarray(loss), (logits,), backward, "cross_entropy")


def linear(x: ArrayLike, weight: DiffArray, bias: Optional[DiffArray] = None) -> DiffArray:
    """x @ W (+ b)."""
    out = as_diff(x) @ weight
    return out + bias if bias is not None else out
