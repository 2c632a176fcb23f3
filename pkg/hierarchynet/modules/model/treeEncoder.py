"""
Tree-based convolution over each subtree, attention (or max) aggregation into one
vector per subtree, and the non-linear transform for nodes left in T'.
"""
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from hierarchynet.modules.model.layers import AttentionTrace, Linear
from hierarchynet.modules.model.params import ParamStore
from hierarchynet.modules.numeric import functional as F
from hierarchynet.modules.numeric.diffArray import DiffArray, add, concat, reshape, zeros


@dataclass
class ForestInput:
    """
    All subtrees of one method packed as a forest. Indices are forest-local; each
    node also records its position in L so its initial embedding can be gathered.
    """
    positions: np.ndarray                 # [n_f] L index of each forest node
    segment: np.ndarray                   # [n_f] subtree index of each node
    edges: List[Tuple[int, int, float, float]]   # (parent, child, eta_left, eta_right)
    n_subtrees: int

    def coefficient_matrices(self) -> Tuple[np.ndarray, np.ndarray]:
        n = len(self.positions)
        left = np.zeros((n, n))
        right = np.zeros((n, n))
        for parent, child, eta_l, eta_r in self.edges:
            left[parent, child] = eta_l
            right[parent, child] = eta_r
        return left, right

    def membership(self) -> np.ndarray:
        return self.segment[None, :] == np.arange(self.n_subtrees)[:, None]


def child_coefficients(n_children: int) -> List[Tuple[float, float]]:
    """(eta_left, eta_right) per child in sibling order; a lone child splits evenly."""
    if n_children == 1:
        return [(0.5, 0.5)]
    out = []
    for i in range(n_children):
        eta_r = i / (n_children - 1)
        out.append((1.0 - eta_r, eta_r))
    return out


class TreeEncoder:
    def __init__(self, store: ParamStore, d: int, n_layers: int, pooling: str = "attention"):
        self.pooling = pooling
        self.W_top = [store.add(f"tree.conv.{i}.W_top", (d, d)) for i in range(n_layers)]
        self.W_left = [store.add(f"tree.conv.{i}.W_left", (d, d)) for i in range(n_layers)]
        self.W_right = [store.add(f"tree.conv.{i}.W_right", (d, d)) for i in range(n_layers)]
        self.b_conv = [store.add(f"tree.conv.{i}.b_conv", (d,), init="zeros") for i in range(n_layers)]
        self.alpha = store.add("tree.alpha", (d,), init="normal", scale=0.1)
        self.non_subtree = Linear(store, "tree.W_ns", d, d)

    def convolve(self, s: DiffArray, forest: ForestInput) -> DiffArray:
        """y = tanh(W_top x_p + sum_i (eta_l W_left + eta_r W_right) x_ci + b_conv), per layer."""
        x = s[forest.positions]
        left, right = forest.coefficient_matrices()
        for W_top, W_left, W_right, b in zip(self.W_top, self.W_left, self.W_right, self.b_conv):
            children = DiffArray(left) @ (x @ W_left) + DiffArray(right) @ (x @ W_right)
            x = F.tanh(x @ W_top + children + b)
        return x

    def aggregate(self, y: DiffArray, forest: ForestInput,
                  trace: Optional[AttentionTrace] = None) -> DiffArray:
        """One d-vector per subtree from its convolved node vectors."""
        member = forest.membership()
        if self.pooling == "max":
            rows = [reshape(F.max_pool(y[np.flatnonzero(member[i])], axis=0), (1, y.shape[1]))
                    for i in range(forest.n_subtrees)]
            return concat(rows, axis=0)
        scores = reshape(y @ reshape(self.alpha, (y.shape[1], 1)), (1, y.shape[0]))
        grid = add(zeros((forest.n_subtrees, y.shape[0])), scores)
        weights = F.softmax(grid, axis=-1, mask=member)
        if trace is not None:
            trace.setdefault("tree.alpha", []).append(weights.values)
        return weights @ y

    def __call__(self, s: DiffArray, forest: ForestInput, unit_subtree: np.ndarray,
                 unit_position: np.ndarray, trace: Optional[AttentionTrace] = None) -> DiffArray:
        """
        t_hat for every coarse unit: the aggregated subtree vector for placeholders,
        tanh(W_ns s + b_ns) for nodes of T' itself. `unit_subtree[j]` is the subtree
        index of unit j or -1; `unit_position[j]` its L index when it is not a placeholder.
        """
        blocks = []
        n_sub = forest.n_subtrees
        if n_sub:
            blocks.append(self.aggregate(self.convolve(s, forest), forest, trace))
        plain = np.flatnonzero(unit_subtree < 0)
        if len(plain):
            blocks.append(F.tanh(self.non_subtree(s[unit_position[plain]])))
        stacked = concat(blocks, axis=0) if len(blocks) > 1 else blocks[0]
        order = np.where(unit_subtree >= 0, unit_subtree, 0)
        order[plain] = n_sub + np.arange(len(plain))
        return stacked[order]
