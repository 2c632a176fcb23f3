"""
Heterogeneous graph transformer over the coarse units of T'.

For an edge e = (s, t) of type phi(e), head i:

    ATT-head^i(s, e, t) = (K^i(s) W^ATT_phi(e) Q^i(t)^T) * mu_phi(e) / sqrt(d_k)
    MSG-head^i(s, e, t) = M-Linear^i_tau(s)(H^{l-1}[s]) W^MSG_phi(e)

Attention is normalised over the incoming edges of each target, messages are summed
with those weights and the node update is

    H^l[t] = FFN(tanh(A-Linear_tau(t)(H~[t]))) + H^{l-1}[t]

K/Q/M/A projections are per node category, W^ATT, W^MSG and mu per edge type.
"""
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from hierarchynet.modules.graph.dependences import EDGE_TYPES
from hierarchynet.modules.hierarchy.rules import COMPOUND_STATEMENTS, OUTPUT_KINDS
from hierarchynet.modules.model.layers import AttentionTrace, FeedForward
from hierarchynet.modules.model.params import ParamStore
from hierarchynet.modules.numeric import functional as F
from hierarchynet.modules.numeric.diffArray import (
    DiffArray, add, mul, reduce_sum, reshape, transpose, zeros,
)
from hierarchynet.modules.syntax.javaLexer import KEYWORDS, OPERATORS

_STRUCTURAL = (
    "method_declaration", "block", "switch_block", "switch_block_statement_group",
    "switch_label", "catch_clause", "finally_clause", "modifiers",
)
NODE_CATEGORIES: List[str] = (
    sorted(OUTPUT_KINDS) + sorted(COMPOUND_STATEMENTS) + list(_STRUCTURAL) + ["leaf", "other"]
)
_CATEGORY_INDEX = {c: i for i, c in enumerate(NODE_CATEGORIES)}


def node_category(node_type: str) -> int:
    """Category id of a graph node: its subtree kind or structural type, else leaf/other."""
    if node_type in _CATEGORY_INDEX:
        return _CATEGORY_INDEX[node_type]
    if node_type in KEYWORDS or node_type in OPERATORS:
        return _CATEGORY_INDEX["leaf"]
    return _CATEGORY_INDEX["other"]


@dataclass
class GraphInput:
    node_category: np.ndarray             # [m]
    src: np.ndarray                       # [E] unit index
    dst: np.ndarray                       # [E]
    edge_type: np.ndarray                 # [E] index into EDGE_TYPES

    @property
    def m(self) -> int:
        return len(self.node_category)

    @property
    def n_edges(self) -> int:
        return len(self.src)

    def incidence(self) -> np.ndarray:
        """[m x E], True where edge e points at node t."""
        return self.dst[None, :] == np.arange(self.m)[:, None]

    def restricted(self, keep_types: Sequence[str]) -> "GraphInput":
        keep_ids = [EDGE_TYPES.index(t) for t in keep_types]
        sel = np.isin(self.edge_type, keep_ids)
        return GraphInput(self.node_category, self.src[sel], self.dst[sel], self.edge_type[sel])


def _typed_projection(x: DiffArray, weights: DiffArray, bias: DiffArray, types: np.ndarray) -> DiffArray:
    """Row i of x through the projection of its own type: x_i W[type_i] + b[type_i]."""
    m, d = x.shape
    w = weights[types]                                  # [m, d, d]
    out = reshape(reshape(x, (m, 1, d)) @ w, (m, weights.shape[-1]))
    return out + bias[types]


def _per_edge_head_transform(x: DiffArray, mats: DiffArray, etypes: np.ndarray) -> DiffArray:
    """x [E, h, dk] times the per-edge-type, per-head matrix -> [E, h, dk]."""
    E, h, dk = x.shape
    w = mats[etypes]                                    # [E, h, dk, dk]
    return reshape(reshape(x, (E, h, 1, dk)) @ w, (E, h, dk))


class HgtLayer:
    def __init__(self, store: ParamStore, name: str, d: int, heads: int, d_ff: int):
        n_types = len(NODE_CATEGORIES)
        n_edges = len(EDGE_TYPES)
        dk = d // heads
        self.d, self.heads, self.dk = d, heads, dk
        self.K = store.add(f"{name}.K_linear.W", (n_types, d, d))
        self.K_b = store.add(f"{name}.K_linear.b", (n_types, d), init="zeros")
        self.Q = store.add(f"{name}.Q_linear.W", (n_types, d, d))
        self.Q_b = store.add(f"{name}.Q_linear.b", (n_types, d), init="zeros")
        self.M = store.add(f"{name}.M_linear.W", (n_types, d, d))
        self.M_b = store.add(f"{name}.M_linear.b", (n_types, d), init="zeros")
        self.A = store.add(f"{name}.A_linear.W", (n_types, d, d))
        self.A_b = store.add(f"{name}.A_linear.b", (n_types, d), init="zeros")
        self.W_att = store.add(f"{name}.W_att", (n_edges, heads, dk, dk))
        self.W_msg = store.add(f"{name}.W_msg", (n_edges, heads, dk, dk))
        self.mu = store.add(f"{name}.mu", (n_edges, heads), init="ones")
        self.ffn = FeedForward(store, f"{name}.ffn", d, d_ff)
        self.name = name

    def __call__(self, h: DiffArray, graph: GraphInput, trace: Optional[AttentionTrace] = None) -> DiffArray:
        m, d = h.shape
        types = graph.node_category
        if graph.n_edges:
            k = reshape(_typed_projection(h, self.K, self.K_b, types), (m, self.heads, self.dk))
            q = reshape(_typed_projection(h, self.Q, self.Q_b, types), (m, self.heads, self.dk))
            msg = reshape(_typed_projection(h, self.M, self.M_b, types), (m, self.heads, self.dk))
            k_e = _per_edge_head_transform(k[graph.src], self.W_att, graph.edge_type)
            msg_e = _per_edge_head_transform(msg[graph.src], self.W_msg, graph.edge_type)
            scores = mul(reduce_sum(mul(k_e, q[graph.dst]), axis=-1), self.mu[graph.edge_type])
            scores = scores / np.sqrt(self.dk)                       # [E, h]
            grid = add(zeros((self.heads, m, graph.n_edges)),
                       reshape(transpose(scores), (self.heads, 1, graph.n_edges)))
            weights = F.softmax(grid, axis=-1, mask=graph.incidence()[None, :, :])
            if trace is not None:
                trace.setdefault(self.name, []).append(weights.values)
            gathered = weights @ transpose(msg_e, (1, 0, 2))          # [h, m, dk]
            h_tilde = reshape(transpose(gathered, (1, 0, 2)), (m, d))
        else:
            h_tilde = zeros((m, d))
        updated = F.tanh(_typed_projection(h_tilde, self.A, self.A_b, types))
        return self.ffn(updated) + h


class HgtEncoder:
    def __init__(self, store: ParamStore, d: int, heads: int, d_ff: int, n_layers: int):
        self.layers = [HgtLayer(store, f"hgt.{i}", d, heads, d_ff) for i in range(n_layers)]

    def __call__(self, t_hat: DiffArray, graph: GraphInput, trace: Optional[AttentionTrace] = None) -> DiffArray:
        h = t_hat
        for layer in self.layers:
            h = layer(h, graph, trace)
        return h


def graph_aggregate(n: DiffArray, beta: DiffArray, trace: Optional[AttentionTrace] = None) -> DiffArray:
    """g = sum_i softmax_i(beta . n_i) n_i"""
    m, d = n.shape
    scores = reshape(n @ reshape(beta, (d, 1)), (1, m))
    weights = F.softmax(scores, axis=-1)
    if trace is not None:
        trace.setdefault("graph.beta", []).append(weights.values)
    return reshape(weights @ n, (d,))


def graph_input_from_edges(node_types: Sequence[str], edges: Sequence, index: Dict[int, int]) -> GraphInput:
    """Build a GraphInput from node types (unit order) and (src_id, dst_id, type) edges."""
    cats = np.array([node_category(t) for t in node_types], dtype=np.int64)
    src = np.array([index[s] for s, _, _ in edges], dtype=np.int64)
    dst = np.array([index[d] for _, d, _ in edges], dtype=np.int64)
    et = np.array([EDGE_TYPES.index(t) for _, _, t in edges], dtype=np.int64)
    return GraphInput(cats, src, dst, et)
