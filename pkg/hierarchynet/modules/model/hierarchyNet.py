"""
HierarchyNet
Sequence encoder over L, tree encoder over the subtrees, HGT over the graph, graph
aggregation, token selection, hierarchy-aware cross attention, gating and a serial
two-memory decoder producing summary-token logits.

Parameter names (one entry each in the ParamStore):

    embed.token / embed.type / embed.src_position     node embeddings, positions
    enc.<i>.*                                         sequence encoder stack
    tree.conv.<i>.{W_top,W_left,W_right,b_conv}       continuous binary tree conv
    tree.alpha, tree.W_ns.*                           tree attention, non-subtree transform
    hgt.<i>.{K,Q,M,A}_linear.*, W_att, W_msg, mu      heterogeneous graph transformer
    graph.beta                                        graph aggregation vector
    haca.f_ca.*, haca.W_k/W_v/W_o.*                   hierarchy-aware cross attention
    gate.W, gate.b, gate.f_c.*                        gating
    embed.target / embed.tgt_position, dec.<i>.*      decoder
    out.*                                             output projection
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from hierarchynet.modules.corpus.bpe import BOS_ID, EOS_ID
from hierarchynet.modules.model import hgt as hgt_module
from hierarchynet.modules.model.hgt import HgtEncoder
from hierarchynet.modules.model.inputs import ModelInput
from hierarchynet.modules.model.layers import (
    AttentionTrace, Linear, TransformerDecoder, TransformerEncoder, merge_heads,
    scaled_dot_attention, split_heads,
)
from hierarchynet.modules.model.modelConfig import ModelConfig
from hierarchynet.modules.model.params import ParamStore
from hierarchynet.modules.model.treeEncoder import TreeEncoder
from hierarchynet.modules.numeric import functional as F
from hierarchynet.modules.numeric.diffArray import (
    DiffArray, concat, mul, no_grad, reshape, sub, zeros,
)
from hierarchynet.utils.errors import PrefixTooLong, SequenceTooLong

logger = logging.getLogger(__name__)


@dataclass
class ForwardTrace:
    attention: AttentionTrace = field(default_factory=dict)
    gate: Optional[np.ndarray] = None
    query_inputs: Optional[np.ndarray] = None


@dataclass
class EncodedMemories:
    memories: List[DiffArray]
    gate: Optional[np.ndarray] = None


class HierarchyNet:
    def __init__(self, config: ModelConfig):
        config.validate()
        config.require_vocab()
        self.config = c = config
        self.store = store = ParamStore(c.seed)
        half = c.d // 2

        self.token_emb = store.add("embed.token", (c.src_vocab, half), init="normal", scale=0.1)
        self.type_emb = store.add("embed.type", (c.type_vocab, half), init="normal", scale=0.1)
        self.src_pos = store.add("embed.src_position", (c.max_src_len, c.d), init="normal", scale=0.02)
        self.encoder = TransformerEncoder(store, "enc", c.d, c.heads, c.d_ff, c.enc_layers)

        self.tree = self.hgt = self.beta = None
        self.f_ca = self.f_c = None
        if c.use_subtrees:
            self.tree = TreeEncoder(store, c.d, c.tbcnn_layers, c.tree_pooling)
            self.beta = store.add("graph.beta", (c.d,), init="normal", scale=0.1)
            if c.use_graph:
                self.hgt = HgtEncoder(store, c.d, c.heads, c.d_ff, c.hgt_layers)
            if c.use_haca:
                self.f_ca = Linear(store, "haca.f_ca", 2 * c.d, c.d)
                self.haca_k = Linear(store, "haca.W_k", c.d, c.d)
                self.haca_v = Linear(store, "haca.W_v", c.d, c.d)
                self.haca_o = Linear(store, "haca.W_o", c.d, c.d)
            if c.decoding != "concat":
                if c.gating_mode == "scalar":
                    self.gate_W = store.add("gate.W", (c.d,), init="normal", scale=0.02)
                    self.gate_b = store.add("gate.b", (1,), init="zeros")
                else:
                    self.gate_W = store.add("gate.W", (c.d, c.d))
                    self.gate_b = store.add("gate.b", (c.d,), init="zeros")
                self.f_c = None if c.identity_fc else Linear(store, "gate.f_c", c.d, c.d)

        self.n_memories = 2 if (c.use_subtrees and c.decoding == "serial") else 1
        self.tgt_emb = store.add("embed.target", (c.tgt_vocab, c.d), init="normal", scale=0.1)
        self.tgt_pos = store.add("embed.tgt_position", (c.max_tgt_len, c.d), init="normal", scale=0.02)
        self.decoder = TransformerDecoder(store, "dec", c.d, c.heads, c.d_ff, c.dec_layers, self.n_memories)
        self.out = Linear(store, "out", c.d, c.tgt_vocab)
        logger.debug(f"HierarchyNet with {store.count()} parameters in {len(store)} arrays")

    # ---------------------------------------------------------------------------------
    # stages

    def init_node_embeddings(self, inp: ModelInput) -> DiffArray:
        """s_i = [token_emb(l_i); type_emb(l_i)], multi-piece tokens averaged."""
        pieces = F.embedding_lookup(self.token_emb, inp.piece_ids)
        tokens = DiffArray(inp.piece_pool) @ pieces
        types = F.embedding_lookup(self.type_emb, inp.type_ids)
        return concat([tokens, types], axis=1)

    def encode_sequence(self, s: DiffArray, key_mask: Optional[np.ndarray] = None,
                        trace: Optional[ForwardTrace] = None) -> DiffArray:
        k = s.shape[0]
        if k > self.config.max_src_len:
            raise SequenceTooLong(k, self.config.max_src_len)
        x = s + self.src_pos[:k]
        return self.encoder(x, key_mask, trace.attention if trace else None)

    def tbcnn_encode(self, s: DiffArray, inp: ModelInput, trace: Optional[ForwardTrace] = None) -> DiffArray:
        return self.tree(s, inp.forest, inp.unit_subtree, inp.unit_position,
                         trace.attention if trace else None)

    def hgt_encode(self, t_hat: DiffArray, inp: ModelInput, trace: Optional[ForwardTrace] = None) -> DiffArray:
        return self.hgt(t_hat, inp.graph, trace.attention if trace else None)

    def graph_aggregate(self, n: DiffArray, trace: Optional[ForwardTrace] = None) -> DiffArray:
        return hgt_module.graph_aggregate(n, self.beta, trace.attention if trace else None)

    def selected_positions(self, inp: ModelInput) -> np.ndarray:
        return inp.token_positions if self.config.use_token_selector else np.arange(inp.k)

    def token_index_select(self, h: DiffArray, inp: ModelInput) -> DiffArray:
        return h[self.selected_positions(inp)]

    def haca_query(self, h_prime: DiffArray, t_aligned: DiffArray) -> DiffArray:
        """q_i = f_ca([h'_i; t_hat(i)])"""
        return self.f_ca(concat([h_prime, t_aligned], axis=1))

    def haca(self, h_prime: DiffArray, t_aligned: DiffArray, n: DiffArray, g: DiffArray,
             trace: Optional[ForwardTrace] = None) -> DiffArray:
        heads = self.config.heads
        q = self.haca_query(h_prime, t_aligned)
        keys = concat([n, reshape(g, (1, g.shape[0]))], axis=0)
        out, weights = scaled_dot_attention(split_heads(q, heads), split_heads(self.haca_k(keys), heads),
                                            split_heads(self.haca_v(keys), heads))
        if trace is not None:
            trace.attention.setdefault("haca", []).append(weights.values)
            trace.query_inputs = np.concatenate([h_prime.values, t_aligned.values], axis=1)
        return self.haca_o(merge_heads(out))

    def gate(self, g: DiffArray, c: DiffArray, h_prime: DiffArray) -> Tuple[DiffArray, DiffArray]:
        """lambda = sigmoid(W g + b); e_i = lambda f_c(c_i) + (1 - lambda) h'_i"""
        if self.config.gating_mode == "scalar":
            lam = F.sigmoid(reshape(g @ reshape(self.gate_W, (g.shape[0], 1)), (1,)) + self.gate_b)
        else:
            lam = F.sigmoid(reshape(reshape(g, (1, g.shape[0])) @ self.gate_W, (g.shape[0],)) + self.gate_b)
        projected = c if self.f_c is None else F.tanh(self.f_c(c))
        e = mul(lam, projected) + mul(sub(1.0, lam), h_prime)
        return e, lam

    # ---------------------------------------------------------------------------------
    # composition

    def encode(self, inp: ModelInput, trace: Optional[ForwardTrace] = None,
               pad_to: Optional[int] = None) -> EncodedMemories:
        """Everything before the decoder; returns its memories in attention order."""
        c = self.config
        s = self.init_node_embeddings(inp)
        k = s.shape[0]
        if pad_to is not None and pad_to > k:
            padded = concat([s, zeros((pad_to - k, c.d))], axis=0)
            mask = np.arange(pad_to) < k
            h = self.encode_sequence(padded, mask, trace)[:k]
        else:
            h = self.encode_sequence(s, None, trace)
        positions = self.selected_positions(inp)
        h_prime = h[positions]
        if not c.use_subtrees:
            return EncodedMemories([h_prime])

        t_hat = self.tbcnn_encode(s, inp, trace)
        n = self.hgt_encode(t_hat, inp, trace) if c.use_graph else t_hat
        g = self.graph_aggregate(n, trace)
        graph_memory = concat([n, reshape(g, (1, c.d))], axis=0)
        if c.decoding == "concat":
            return EncodedMemories([concat([h_prime, graph_memory], axis=0)])

        if c.use_haca:
            t_aligned = t_hat[inp.owner[positions]]
            ctx = self.haca(h_prime, t_aligned, n, g, trace)
        else:
            ctx = h_prime
        e, lam = self.gate(g, ctx, h_prime)
        if trace is not None:
            trace.gate = lam.values.copy()
        if c.decoding == "gating_only":
            return EncodedMemories([e], lam.values.copy())
        return EncodedMemories([graph_memory, e], lam.values.copy())

    def decode(self, prefix_ids: Sequence[int], memories: Sequence[DiffArray],
               trace: Optional[ForwardTrace] = None) -> DiffArray:
        prefix = np.asarray(prefix_ids, dtype=np.int64)
        T = len(prefix)
        if T > self.config.max_tgt_len:
            raise PrefixTooLong(T, self.config.max_tgt_len)
        y = F.embedding_lookup(self.tgt_emb, prefix) + self.tgt_pos[:T]
        y = self.decoder(y, memories, trace.attention if trace else None)
        return self.out(y)

    def forward_loss(self, inp: ModelInput, trace: Optional[ForwardTrace] = None,
                     pad_to: Optional[int] = None) -> DiffArray:
        """Teacher-forced token cross-entropy of the summary given the method."""
        target = inp.target_ids
        enc = self.encode(inp, trace, pad_to)
        logits = self.decode(target[:-1], enc.memories, trace)
        return F.cross_entropy(logits, target[1:])

    def greedy_decode(self, inp: ModelInput, max_len: Optional[int] = None) -> List[int]:
        """Argmax decoding from <bos> until <eos> or `max_len` tokens; ties go to the lowest id."""
        max_len = min(max_len or self.config.max_tgt_len, self.config.max_tgt_len)
        with no_grad():
            memories = self.encode(inp).memories
            prefix = [BOS_ID]
            out: List[int] = []
            while len(out) < max_len:
                logits = self.decode(prefix, memories).values
                nxt = int(np.argmax(logits[-1]))
                if nxt == EOS_ID:
                    break
                out.append(nxt)
                prefix.append(nxt)
        return out

    def gate_scores(self, inp: ModelInput) -> Optional[np.ndarray]:
        """lambda for one method (shape [1] in scalar mode, [d] in vector mode)."""
        with no_grad():
            return self.encode(inp).gate

    def parameters(self):
        return self.store.named()
