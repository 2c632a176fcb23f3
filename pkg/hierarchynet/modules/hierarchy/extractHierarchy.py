"""
Subtree extraction
Detaches statement/expression subtrees from T, leaving a reduced tree T' with one
placeholder per subtree, and aligns every position of L with its coarse unit.
"""
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

from hierarchynet.modules.hierarchy.rules import classify_subtree_root
from hierarchynet.modules.syntax.astNode import AstNode, LinearSeq

PLACEHOLDER = "subtree_placeholder"


@dataclass
class Subtree:
    id: int
    kind: str
    root_node: int
    node_ids: FrozenSet[int]
    placeholder_id: int
    root: AstNode = field(repr=False, default=None)

    def text(self) -> str:
        return self.root.text() if self.root is not None else ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "root_node": self.root_node,
            "node_ids": sorted(self.node_ids),
            "placeholder_id": self.placeholder_id,
            "text": self.text(),
        }


@dataclass
class ReducedTree:
    root: AstNode
    subtree_of: Dict[int, int]          # placeholder id -> subtree id
    original_ids: FrozenSet[int]        # ids of T nodes that survive in T'

    def nodes(self) -> List[AstNode]:
        return list(self.root.walk())

    def is_placeholder(self, node_id: int) -> bool:
        return node_id in self.subtree_of

    def parent_map(self) -> Dict[int, int]:
        parents: Dict[int, int] = {}
        for node in self.root.walk():
            for child in node.children:
                parents[child.id] = node.id
        return parents

    def to_dict(self) -> dict:
        return {
            "root": self.root.id,
            "nodes": [n.to_dict() for n in self.root.walk()],
            "subtree_of": {str(k): v for k, v in self.subtree_of.items()},
        }


@dataclass
class CoarseUnit:
    index: int
    node_id: int                  # id in T'
    node_type: str
    subtree_id: Optional[int] = None


@dataclass
class AlignmentMap:
    units: List[CoarseUnit]
    owner: List[int]              # L index -> coarse unit index

    @property
    def m(self) -> int:
        return len(self.units)

    def unit_of_node(self) -> Dict[int, int]:
        return {u.node_id: u.index for u in self.units}

    def to_dict(self) -> dict:
        return {
            "units": [
                {"index": u.index, "node_id": u.node_id, "type": u.node_type, "subtree": u.subtree_id}
                for u in self.units
            ],
            "owner": list(self.owner),
        }


def extract_hierarchy(tree: AstNode, linear: Optional[LinearSeq] = None) -> Tuple[ReducedTree, List[Subtree], AlignmentMap]:
    """
    Depth-first walk of T. A node matching a subtree rule is detached into ST and
    replaced by a placeholder; traversal halts at that node.
    """
    next_id = max(n.id for n in tree.walk()) + 1
    subtrees: List[Subtree] = []
    subtree_of: Dict[int, int] = {}
    survivors: List[int] = []

    def visit(node: AstNode, chain: Tuple[AstNode, ...]) -> AstNode:
        nonlocal next_id
        kind = classify_subtree_root(node, chain)
        if kind is not None:
            sid = len(subtrees)
            placeholder = AstNode(next_id, PLACEHOLDER, "", [], node.span,
                                  {"kind": kind, "subtree": str(sid)})
            next_id += 1
            ids = frozenset(n.id for n in node.walk())
            subtrees.append(Subtree(sid, kind, node.id, ids, placeholder.id, node))
            subtree_of[placeholder.id] = sid
            return placeholder
        survivors.append(node.id)
        kept = AstNode(node.id, node.node_type, node.token, [], node.span, dict(node.attrs))
        below = chain + (node,)
        kept.children = [visit(child, below) for child in node.children]
        return kept

    reduced_root = visit(tree, ())
    reduced = ReducedTree(reduced_root, subtree_of, frozenset(survivors))

    units: List[CoarseUnit] = []
    for i, node in enumerate(reduced_root.walk()):
        units.append(CoarseUnit(i, node.id, node.node_type, subtree_of.get(node.id)))

    unit_by_node = {u.node_id: u.index for u in units}
    for st in subtrees:
        unit = unit_by_node[st.placeholder_id]
        for nid in st.node_ids:
            unit_by_node[nid] = unit

    order = linear.nodes if linear is not None else [n.id for n in tree.walk()]
    owner = [unit_by_node[nid] for nid in order]
    return reduced, subtrees, AlignmentMap(units, owner)
