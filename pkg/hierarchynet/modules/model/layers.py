"""
Transformer building blocks: multi-head attention, feed-forward, encoder and decoder
layers. Post-norm residual sub-layers throughout.
"""
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from hierarchynet.modules.model.params import ParamStore
from hierarchynet.modules.numeric import functional as F
from hierarchynet.modules.numeric.diffArray import DiffArray, reshape, transpose
from hierarchynet.utils.errors import ShapeMismatch

AttentionTrace = Dict[str, List[np.ndarray]]


def split_heads(x: DiffArray, heads: int) -> DiffArray:
    """[n x d] -> [heads x n x d_k]"""
    n, d = x.shape
    return transpose(reshape(x, (n, heads, d // heads)), (1, 0, 2))


def merge_heads(x: DiffArray) -> DiffArray:
    """[heads x n x d_k] -> [n x d]"""
    h, n, dk = x.shape
    return reshape(transpose(x, (1, 0, 2)), (n, h * dk))


def scaled_dot_attention(q: DiffArray, k: DiffArray, v: DiffArray,
                         mask: Optional[np.ndarray] = None) -> Tuple[DiffArray, DiffArray]:
    """softmax(Q K^T / sqrt(d_k)) V over heads; `mask` [n_q x n_k], True = attend."""
    dk = q.shape[-1]
    scores = (q @ transpose(k, (0, 2, 1))) / np.sqrt(dk)
    weights = F.softmax(scores, axis=-1, mask=None if mask is None else mask[None, :, :])
    return weights @ v, weights


def causal_mask(n: int) -> np.ndarray:
    return np.tril(np.ones((n, n), dtype=bool))


class Linear:
    def __init__(self, store: ParamStore, name: str, d_in: int, d_out: int, bias: bool = True):
        self.W = store.add(f"{name}.W", (d_in, d_out))
        self.b = store.add(f"{name}.b", (d_out,), init="zeros") if bias else None

    def __call__(self, x: DiffArray) -> DiffArray:
        return F.linear(x, self.W, self.b)


class LayerNorm:
    def __init__(self, store: ParamStore, name: str, d: int):
        self.gamma = store.add(f"{name}.gamma", (d,), init="ones")
        self.beta = store.add(f"{name}.beta", (d,), init="zeros")

    def __call__(self, x: DiffArray) -> DiffArray:
        return F.layer_norm(x, self.gamma, self.beta)


class MultiHeadAttention:
    def __init__(self, store: ParamStore, name: str, d: int, heads: int, query_dim: Optional[int] = None):
        if d % heads:
            raise ShapeMismatch(name, (d, heads), "d divisible by heads")
        self.name = name
        self.heads = heads
        self.W_q = Linear(store, f"{name}.W_q", query_dim or d, d)
        self.W_k = Linear(store, f"{name}.W_k", d, d)
        self.W_v = Linear(store, f"{name}.W_v", d, d)
        self.W_o = Linear(store, f"{name}.W_o", d, d)

    def __call__(self, query: DiffArray, memory: DiffArray, mask: Optional[np.ndarray] = None,
                 trace: Optional[AttentionTrace] = None) -> DiffArray:
        q = split_heads(self.W_q(query), self.heads)
        k = split_heads(self.W_k(memory), self.heads)
        v = split_heads(self.W_v(memory), self.heads)
        out, weights = scaled_dot_attention(q, k, v, mask)
        if trace is not None:
            trace.setdefault(self.name, []).append(weights.values)
        return self.W_o(merge_heads(out))


class FeedForward:
    def __init__(self, store: ParamStore, name: str, d: int, d_ff: int):
        self.inner = Linear(store, f"{name}.W_1", d, d_ff)
        self.outer = Linear(store, f"{name}.W_2", d_ff, d)

    def __call__(self, x: DiffArray) -> DiffArray:
        return self.outer(F.relu(self.inner(x)))


class EncoderLayer:
    def __init__(self, store: ParamStore, name: str, d: int, heads: int, d_ff: int):
        self.attn = MultiHeadAttention(store, f"{name}.self_attn", d, heads)
        self.norm1 = LayerNorm(store, f"{name}.norm1", d)
        self.ffn = FeedForward(store, f"{name}.ffn", d, d_ff)
        self.norm2 = LayerNorm(store, f"{name}.norm2", d)

    def __call__(self, x: DiffArray, key_mask: Optional[np.ndarray] = None,
                 trace: Optional[AttentionTrace] = None) -> DiffArray:
        mask = None
        if key_mask is not None:
            mask = np.broadcast_to(key_mask[None, :], (x.shape[0], x.shape[0]))
        x = self.norm1(x + self.attn(x, x, mask, trace))
        return self.norm2(x + self.ffn(x))


class DecoderLayer:
    """Causal self-attention, then one cross-attention per memory in order, then FFN."""

    def __init__(self, store: ParamStore, name: str, d: int, heads: int, d_ff: int, n_memories: int):
        self.self_attn = MultiHeadAttention(store, f"{name}.self_attn", d, heads)
        self.self_norm = LayerNorm(store, f"{name}.norm_self", d)
        self.cross = [MultiHeadAttention(store, f"{name}.cross_{i}", d, heads) for i in range(n_memories)]
        self.cross_norms = [LayerNorm(store, f"{name}.norm_cross_{i}", d) for i in range(n_memories)]
        self.ffn = FeedForward(store, f"{name}.ffn", d, d_ff)
        self.ffn_norm = LayerNorm(store, f"{name}.norm_ffn", d)

    def __call__(self, y: DiffArray, memories: Sequence[DiffArray],
                 trace: Optional[AttentionTrace] = None) -> DiffArray:
        if len(memories) != len(self.cross):
            raise ShapeMismatch("decoder memories", (len(memories),), (len(self.cross),))
        y = self.self_norm(y + self.self_attn(y, y, causal_mask(y.shape[0]), trace))
        for attn, norm, memory in zip(self.cross, self.cross_norms, memories):
            y = norm(y + attn(y, memory, None, trace))
        return self.ffn_norm(y + self.ffn(y))


class TransformerEncoder:
    def __init__(self, store: ParamStore, name: str, d: int, heads: int, d_ff: int, n_layers: int):
        self.layers = [EncoderLayer(store, f"{name}.{i}", d, heads, d_ff) for i in range(n_layers)]

    def __call__(self, x: DiffArray, key_mask: Optional[np.ndarray] = None,
                 trace: Optional[AttentionTrace] = None) -> DiffArray:
        for layer in self.layers:
            x = layer(x, key_mask, trace)
        return x


class TransformerDecoder:
    def __init__(self, store: ParamStore, name: str, d: int, heads: int, d_ff: int,
                 n_layers: int, n_memories: int):
        self.layers = [DecoderLayer(store, f"{name}.{i}", d, heads, d_ff, n_memories)
                       for i in range(n_layers)]

    def __call__(self, y: DiffArray, memories: Sequence[DiffArray],
                 trace: Optional[AttentionTrace] = None) -> DiffArray:
        for layer in self.layers:
            y = layer(y, memories, trace)
        return y
