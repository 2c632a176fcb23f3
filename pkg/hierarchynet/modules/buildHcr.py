"""
HCR Assembly Module
Builds one method's three-layer representation: the linearized sequence L, the
subtree set ST with the reduced tree T', and the heterogeneous graph G.
"""
from dataclasses import dataclass
from typing import List, Optional

from hierarchynet.modules.graph.dependences import (
    EdgeFlags, HetGraph, assemble_graph, compute_edge_sets,
)
from hierarchynet.modules.hierarchy.extractHierarchy import (
    AlignmentMap, ReducedTree, Subtree, extract_hierarchy,
)
from hierarchynet.modules.syntax.astNode import AstNode, LinearSeq
from hierarchynet.modules.syntax.javaParser import parse_method
from hierarchynet.modules.syntax.subtokens import insert_subtoken_nodes, linearize


@dataclass
class HcrBundle:
    source: str
    tree: AstNode               # T after sub-token insertion
    linear: LinearSeq           # L
    reduced: ReducedTree        # T'
    subtrees: List[Subtree]     # ST
    alignment: AlignmentMap
    graph: HetGraph             # G

    @property
    def k(self) -> int:
        return len(self.linear)

    @property
    def m(self) -> int:
        return self.alignment.m

    def unit_node_types(self) -> List[str]:
        return [n.node_type for n in self.graph.nodes]

    def to_record(self) -> dict:
        return {
            "linear": self.linear.to_dict(),
            "subtrees": [st.to_dict() for st in self.subtrees],
            "reduced_tree": self.reduced.to_dict(),
            "alignment": self.alignment.to_dict(),
            "graph": self.graph.to_dict(),
            "tree_size": self.tree.size(),
        }


def build_hcr(source: str, flags: Optional[EdgeFlags] = None, reverse_edges: bool = True) -> HcrBundle:
    """Parse, sub-tokenize, linearize, extract subtrees and build the graph for one method."""
    flags = flags or EdgeFlags()
    original = parse_method(source)
    tree = insert_subtoken_nodes(original)
    linear = linearize(tree)
    reduced, subtrees, alignment = extract_hierarchy(tree, linear)
    edge_sets = compute_edge_sets(reduced, subtrees, original.index())
    graph = assemble_graph(reduced, subtrees, flags, edge_sets, reverse_edges=reverse_edges)
    return HcrBundle(source, tree, linear, reduced, subtrees, alignment, graph)
