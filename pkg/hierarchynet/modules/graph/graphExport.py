"""
DOT exports of the reduced tree and of the heterogeneous graph.
"""
from typing import Dict, List, Optional

from hierarchynet.modules.graph.dependences import FORWARD_EDGE_TYPES, HetGraph
from hierarchynet.modules.hierarchy.extractHierarchy import ReducedTree, Subtree

EDGE_COLORS = {
    "AST": "green",
    "CD": "purple",
    "DF": "goldenrod",
    "NS": "blue",
}
EDGE_STYLES = {"AST": "solid", "CD": "dashed", "DF": "dashed", "NS": "dashed"}


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _label(node_type: str, token: str = "", text: str = "") -> str:
    if text:
        return f"{node_type}\\n{text}"
    if token:
        return f"{node_type}\\n{token}"
    return node_type


def reduced_tree_to_dot(t_prime: ReducedTree, subtrees: List[Subtree]) -> str:
    """T' with placeholder nodes shaded."""
    by_id = {st.id: st for st in subtrees}
    lines = ["digraph reduced_tree {", "  node [shape=box, fontsize=10];"]
    for node in t_prime.root.walk():
        attrs = []
        if t_prime.is_placeholder(node.id):
            st = by_id[t_prime.subtree_of[node.id]]
            attrs.append("style=filled")
            attrs.append("fillcolor=lightgray")
            label = _label(st.kind, text=st.text())
        else:
            label = _label(node.node_type, node.token)
        attrs.insert(0, f"label={_quote(label)}")
        lines.append(f"  n{node.id} [{', '.join(attrs)}];")
    for node in t_prime.root.walk():
        for child in node.children:
            lines.append(f"  n{node.id} -> n{child.id};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_dot(graph: HetGraph, texts: Optional[Dict[int, str]] = None) -> str:
    """Forward edges only, one color per edge type."""
    texts = texts or {}
    lines = ["digraph hcr {", "  node [shape=box, fontsize=10];"]
    for node in graph.nodes:
        label = _label(node.node_type, text=texts.get(node.id, ""))
        style = ", style=filled, fillcolor=lightgray" if node.subtree_kind else ""
        lines.append(f"  n{node.id} [label={_quote(label)}{style}];")
    for src, dst, etype in graph.edges:
        if etype not in FORWARD_EDGE_TYPES:
            continue
        lines.append(
            f"  n{src} -> n{dst} [color={EDGE_COLORS[etype]}, style={EDGE_STYLES[etype]}, label={etype}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
