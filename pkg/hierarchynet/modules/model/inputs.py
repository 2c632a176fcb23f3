"""
Turns an HcrBundle into the index arrays the model consumes.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from hierarchynet.modules.buildHcr import HcrBundle
from hierarchynet.modules.corpus.bpe import BOS_ID, EOS_ID, NOTOKEN, BpeTokenizer
from hierarchynet.modules.graph.dependences import REVERSE_SUFFIX, EdgeFlags
from hierarchynet.modules.model.hgt import GraphInput, graph_input_from_edges
from hierarchynet.modules.model.treeEncoder import ForestInput, child_coefficients
from hierarchynet.modules.syntax.javaParser import grammar_vocabulary
from hierarchynet.utils.errors import UnknownType

TYPE_VOCAB: List[str] = grammar_vocabulary()
_TYPE_INDEX: Dict[str, int] = {t: i for i, t in enumerate(TYPE_VOCAB)}


def type_id(node_type: str) -> int:
    try:
        return _TYPE_INDEX[node_type]
    except KeyError:
        raise UnknownType(node_type) from None


@dataclass
class ModelInput:
    piece_ids: np.ndarray          # [P] source BPE pieces of every node token
    piece_pool: np.ndarray         # [k x P] row i averages the pieces of node i
    type_ids: np.ndarray           # [k]
    token_positions: np.ndarray    # [k'] L indices with non-empty token
    owner: np.ndarray              # [k] coarse unit of each L index
    forest: ForestInput
    unit_subtree: np.ndarray       # [m] subtree index, or -1
    unit_position: np.ndarray      # [m] L index of non-placeholder units, or -1
    graph: GraphInput
    target_ids: Optional[np.ndarray] = None     # <bos> ... <eos>
    summary: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return len(self.type_ids)

    @property
    def m(self) -> int:
        return len(self.unit_subtree)


def _source_pieces(bundle: HcrBundle, tokenizer: BpeTokenizer):
    notoken = tokenizer.id_of(NOTOKEN)
    rows: List[List[int]] = []
    for token in bundle.linear.tokens:
        rows.append(tokenizer.encode_word(token) if token else [notoken])
    flat = [i for row in rows for i in row]
    pool = np.zeros((len(rows), len(flat)))
    col = 0
    for r, row in enumerate(rows):
        pool[r, col:col + len(row)] = 1.0 / len(row)
        col += len(row)
    return np.array(flat, dtype=np.int64), pool


def _forest(bundle: HcrBundle, position_of: Dict[int, int]) -> ForestInput:
    positions: List[int] = []
    segment: List[int] = []
    edges = []
    for index, st in enumerate(bundle.subtrees):
        local: Dict[int, int] = {}
        for node in st.root.walk():
            local[node.id] = len(positions)
            positions.append(position_of[node.id])
            segment.append(index)
        for node in st.root.walk():
            coeffs = child_coefficients(len(node.children)) if node.children else []
            for child, (eta_l, eta_r) in zip(node.children, coeffs):
                edges.append((local[node.id], local[child.id], eta_l, eta_r))
    return ForestInput(np.array(positions, dtype=np.int64), np.array(segment, dtype=np.int64),
                       edges, len(bundle.subtrees))


def _graph(bundle: HcrBundle, flags: Optional[EdgeFlags], reverse_edges: bool) -> GraphInput:
    graph = bundle.graph
    enabled = set((flags or EdgeFlags()).enabled())
    edges = []
    for s, d, t in graph.edges:
        base = t[:-len(REVERSE_SUFFIX)] if t.endswith(REVERSE_SUFFIX) else t
        if base not in enabled:
            continue
        if t != base and not reverse_edges:
            continue
        edges.append((s, d, t))
    types = [n.node_type for n in graph.nodes]
    return graph_input_from_edges(types, edges, graph.index())


def prepare_input(bundle: HcrBundle, src_tokenizer: BpeTokenizer,
                  tgt_tokenizer: Optional[BpeTokenizer] = None, summary: Optional[str] = None,
                  max_tgt_len: int = 32, flags: Optional[EdgeFlags] = None,
                  reverse_edges: bool = True) -> ModelInput:
    """Index arrays for one method; the target is `<bos> summary <eos>` cut to `max_tgt_len` + 1."""
    linear = bundle.linear
    position_of = {nid: i for i, nid in enumerate(linear.nodes)}
    piece_ids, piece_pool = _source_pieces(bundle, src_tokenizer)
    type_ids = np.array([type_id(t) for t in linear.node_types], dtype=np.int64)

    units = bundle.alignment.units
    unit_subtree = np.array([u.subtree_id if u.subtree_id is not None else -1 for u in units], dtype=np.int64)
    unit_position = np.array(
        [-1 if u.subtree_id is not None else position_of[u.node_id] for u in units], dtype=np.int64
    )
    target = None
    if tgt_tokenizer is not None and summary is not None:
        ids = tgt_tokenizer.encode(summary)[:max(max_tgt_len - 1, 0)]
        target = np.array([BOS_ID] + ids + [EOS_ID], dtype=np.int64)
    return ModelInput(
        piece_ids=piece_ids,
        piece_pool=piece_pool,
        type_ids=type_ids,
        token_positions=np.array(linear.token_positions, dtype=np.int64),
        owner=np.array(bundle.alignment.owner, dtype=np.int64),
        forest=_forest(bundle, position_of),
        unit_subtree=unit_subtree,
        unit_position=unit_position,
        graph=_graph(bundle, flags, reverse_edges),
        target_ids=target,
        summary=summary or "",
        meta={"k": bundle.k, "m": bundle.m, "n_subtrees": len(bundle.subtrees)},
    )
