"""
Graph-level layer: AST, control-dependence, data-flow and next-subtree edges over
the coarse units of T'.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from hierarchynet.modules.graph.controlFlow import (
    compound_parts, for_sections, is_unit, statement_list, build_cfg,
)
from hierarchynet.modules.graph.dataFlow import (
    collect_defs_uses, data_flow_edges, reaching_definitions,
)
from hierarchynet.modules.hierarchy.extractHierarchy import ReducedTree, Subtree
from hierarchynet.modules.syntax.astNode import AstNode
from hierarchynet.utils.errors import ConfigError

Edge = Tuple[int, int]

FORWARD_EDGE_TYPES = ("AST", "CD", "DF", "NS")
REVERSE_SUFFIX = "_rev"
EDGE_TYPES = FORWARD_EDGE_TYPES + tuple(t + REVERSE_SUFFIX for t in FORWARD_EDGE_TYPES)

COMPOUNDS = frozenset((
    "if_statement", "while_statement", "for_statement", "dowhile_statement",
    "switchcase_statement", "try_statement", "try_with_resources_statement",
))


@dataclass
class EdgeFlags:
    use_ast: bool = True
    use_ns: bool = True
    use_cd: bool = True
    use_df: bool = True

    def enabled(self) -> List[str]:
        flags = {"AST": self.use_ast, "NS": self.use_ns, "CD": self.use_cd, "DF": self.use_df}
        return [t for t in FORWARD_EDGE_TYPES if flags[t]]

    def validate(self, graph_enabled: bool = True) -> None:
        if graph_enabled and not self.use_ast:
            raise ConfigError("AST edges must be enabled whenever the graph layer is used")

    def to_dict(self) -> dict:
        return {"use_ast": self.use_ast, "use_ns": self.use_ns, "use_cd": self.use_cd, "use_df": self.use_df}

    @classmethod
    def from_dict(cls, data: dict) -> "EdgeFlags":
        return cls(**{k: bool(v) for k, v in data.items() if k in ("use_ast", "use_ns", "use_cd", "use_df")})

    @classmethod
    def from_names(cls, names: Sequence[str]) -> "EdgeFlags":
        wanted = {n.strip().lower() for n in names if n.strip()}
        unknown = wanted - {"ast", "ns", "cd", "df"}
        if unknown:
            raise ConfigError(f"unknown edge types: {sorted(unknown)}")
        return cls("ast" in wanted, "ns" in wanted, "cd" in wanted, "df" in wanted)


@dataclass
class GraphNode:
    id: int
    node_type: str
    subtree_kind: Optional[str] = None


@dataclass
class HetGraph:
    nodes: List[GraphNode]
    edges: List[Tuple[int, int, str]] = field(default_factory=list)

    def index(self) -> Dict[int, int]:
        return {n.id: i for i, n in enumerate(self.nodes)}

    def edges_of(self, edge_type: str) -> List[Edge]:
        return [(s, d) for s, d, t in self.edges if t == edge_type]

    def edge_counts(self) -> Dict[str, int]:
        counts = {t: 0 for t in EDGE_TYPES}
        for _, _, t in self.edges:
            counts[t] += 1
        return counts

    def indexed_edges(self) -> List[Tuple[int, int, str]]:
        """Edges with endpoints as positions in `nodes` (coarse-unit order)."""
        idx = self.index()
        return [(idx[s], idx[d], t) for s, d, t in self.edges]

    def to_dict(self) -> dict:
        nodes = []
        for n in self.nodes:
            rec = {"id": n.id, "type": n.node_type}
            if n.subtree_kind is not None:
                rec["subtree_kind"] = n.subtree_kind
            nodes.append(rec)
        return {"nodes": nodes, "edges": [{"src": s, "dst": d, "type": t} for s, d, t in self.edges]}

    @classmethod
    def from_dict(cls, data: dict) -> "HetGraph":
        nodes = [GraphNode(n["id"], n["type"], n.get("subtree_kind")) for n in data["nodes"]]
        edges = [(e["src"], e["dst"], e["type"]) for e in data["edges"]]
        return cls(nodes, edges)


# ---------------------------------------------------------------------------------------
# AST edges

def ast_edges(t_prime: ReducedTree) -> List[Edge]:
    return [(node.id, child.id) for node in t_prime.root.walk() for child in node.children]


# ---------------------------------------------------------------------------------------
# control dependence (syntax directed)

def control_dependence_edges(t_prime: ReducedTree) -> List[Edge]:
    """
    Every unit in the body of an if/while/for/do/switch (and the try block and catch
    bodies of a try-with-resources) depends on the governing condition, selector or
    resource unit. Edges run condition -> statement.
    """
    edges: Set[Edge] = set()

    def governing_head(node: AstNode, heads: List[AstNode]) -> Optional[AstNode]:
        if node.node_type == "for_statement":
            return for_sections(node)[1]
        if node.node_type == "try_statement":
            return None
        return heads[-1] if heads else None

    def visit(node: AstNode, governor: Optional[int]) -> None:
        if is_unit(node):
            if governor is not None and governor != node.id:
                edges.add((governor, node.id))
            return
        if node.node_type in COMPOUNDS:
            heads, governed, free = compound_parts(node)
            for h in heads:
                visit(h, governor)
            head = governing_head(node, heads)
            inner = head.id if head is not None else governor
            for body in governed:
                visit(body, inner)
            for body in free:
                visit(body, governor)
            return
        for child in node.children:
            visit(child, governor)

    visit(t_prime.root, None)
    return sorted(edges)


# ---------------------------------------------------------------------------------------
# next-subtree chains

def _contributed_units(stmt: AstNode) -> List[int]:
    """Units a statement adds to the chain of the block containing it."""
    if is_unit(stmt):
        return [stmt.id]
    if stmt.node_type in COMPOUNDS:
        heads, _, _ = compound_parts(stmt)
        return [h.id for h in heads]
    return []


def block_chains(t_prime: ReducedTree) -> List[List[int]]:
    """
    One chain per block, units in source order. A compound statement contributes its
    head units to the enclosing chain; its last head leads each body chain (for
    do-while, whose condition follows the body, it closes the body chain instead).
    The method header leads the method body chain.
    """
    chains: List[List[int]] = []

    def body_chain(body: AstNode, lead: Optional[int], trail: Optional[int] = None) -> None:
        if body.node_type == "switch_block":
            chain = [lead] if lead is not None else []
            nested: List[AstNode] = []
            for group in body.children:
                if group.node_type != "switch_block_statement_group":
                    continue
                for child in group.children:
                    if child.node_type == "switch_label":
                        chain.extend(c.id for c in child.children if is_unit(c))
                    else:
                        chain.extend(_contributed_units(child))
                        nested.append(child)
            chains.append(chain)
            for stmt in nested:
                descend(stmt)
            return
        stmts = statement_list(body)
        chain = [lead] if lead is not None else []
        for stmt in stmts:
            chain.extend(_contributed_units(stmt))
        if trail is not None:
            chain.append(trail)
        chains.append(chain)
        for stmt in stmts:
            descend(stmt)

    def descend(stmt: AstNode) -> None:
        if stmt.node_type == "block":
            body_chain(stmt, None)
            return
        if stmt.node_type not in COMPOUNDS:
            return
        heads, governed, free = compound_parts(stmt)
        last = heads[-1].id if heads else None
        if stmt.node_type == "dowhile_statement":
            body_chain(governed[0], None, trail=last)
            return
        if stmt.node_type == "try_statement":
            last = None
        for body in governed:
            body_chain(body, last)
        for body in free:
            body_chain(body, None)

    root = t_prime.root
    header = next((c for c in root.children if is_unit(c)), None)
    for child in root.children:
        if child.node_type == "block":
            body_chain(child, header.id if header is not None else None)
    return chains


def next_subtree_edges(chains: List[List[int]]) -> List[Edge]:
    """NS edge between each pair of consecutive units of a chain."""
    edges: Set[Edge] = set()
    for chain in chains:
        for a, b in zip(chain, chain[1:]):
            if a != b:
                edges.add((a, b))
    return sorted(edges)


# ---------------------------------------------------------------------------------------
# assembly

def compute_edge_sets(t_prime: ReducedTree, subtrees: List[Subtree],
                      original: Optional[Dict[int, AstNode]] = None) -> Dict[str, List[Edge]]:
    """Every forward edge set of the graph layer, before flag filtering."""
    roots = {st.placeholder_id: st.root for st in subtrees}
    cfg = build_cfg(t_prime)
    pairs = reaching_definitions(cfg, collect_defs_uses(roots, original))
    return {
        "AST": ast_edges(t_prime),
        "CD": control_dependence_edges(t_prime),
        "DF": data_flow_edges(pairs),
        "NS": next_subtree_edges(block_chains(t_prime)),
    }


def assemble_graph(t_prime: ReducedTree, subtrees: List[Subtree], flags: EdgeFlags,
                   edge_sets: Optional[Dict[str, List[Edge]]] = None,
                   reverse_edges: bool = True) -> HetGraph:
    """Union of the enabled edge sets over the nodes of T', plus reverse edges."""
    if edge_sets is None:
        edge_sets = compute_edge_sets(t_prime, subtrees)
    kinds = {st.placeholder_id: st.kind for st in subtrees}
    nodes = []
    for node in t_prime.root.walk():
        kind = kinds.get(node.id)
        nodes.append(GraphNode(node.id, kind if kind is not None else node.node_type, kind))
    edges: List[Tuple[int, int, str]] = []
    for etype in flags.enabled():
        for s, d in edge_sets.get(etype, []):
            edges.append((s, d, etype))
    if reverse_edges:
        edges += [(d, s, t + REVERSE_SUFFIX) for s, d, t in list(edges)]
    return HetGraph(nodes, edges)
