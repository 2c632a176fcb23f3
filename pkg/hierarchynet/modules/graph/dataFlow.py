"""
Def/use collection per statement unit and reaching-definitions analysis.

Variables are identified by simple name. `a.b` is a use of `a`; a method call uses
its receiver and argument identifiers, never the method name.
"""
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from hierarchynet.modules.graph.controlFlow import Cfg
from hierarchynet.modules.syntax.astNode import AstNode
from hierarchynet.utils.errors import NonTermination

Definition = Tuple[int, str]                 # (defining unit, variable)
DefUsePair = Tuple[int, int, str]            # (def unit, use unit, variable)

_TYPE_NODES = frozenset((
    "primitive_type", "void_type", "type_identifier", "scoped_type_identifier", "generic_type",
    "type_arguments", "wildcard", "array_type", "dimensions", "catch_type",
))


@dataclass
class DefsUses:
    defs: Set[str] = field(default_factory=set)
    uses: Set[str] = field(default_factory=set)


def _name(node: AstNode) -> str:
    if node.token:
        return node.token
    # identifier already split into sub-tokens
    return "".join(c.token for c in node.children)


def _collect(node: AstNode, out: DefsUses) -> None:
    t = node.node_type
    if t in _TYPE_NODES or t == "annotation":
        return
    if t == "identifier":
        out.uses.add(_name(node))
        return
    if t == "assignment_expression":
        lhs, op, rhs = node.children
        if lhs.node_type == "identifier":
            out.defs.add(_name(lhs))
            if op.token != "=":
                out.uses.add(_name(lhs))
        else:
            _collect(lhs, out)
        _collect(rhs, out)
        return
    if t == "update_expression":
        target = node.children[1] if node.children[0].is_leaf and node.children[0].token in ("++", "--") else node.children[0]
        if target.node_type == "identifier":
            out.defs.add(_name(target))
            out.uses.add(_name(target))
        else:
            _collect(target, out)
        return
    if t == "variable_declarator":
        out.defs.add(_name(node.children[0]))
        for child in node.children[1:]:
            _collect(child, out)
        return
    if t == "resource" and len(node.children) > 1:
        ident = next(c for c in node.children if c.node_type == "identifier")
        out.defs.add(_name(ident))
        _collect(node.children[-1], out)
        return
    if t in ("formal_parameter", "spread_parameter"):
        ident = [c for c in node.children if c.node_type == "identifier"][-1]
        out.defs.add(_name(ident))
        return
    if t == "method_invocation":
        # [object, '.', name, args] or [name, args]
        if len(node.children) == 4:
            _collect(node.children[0], out)
        _collect(node.children[-1], out)
        return
    if t == "field_access":
        _collect(node.children[0], out)
        return
    if t in ("object_creation_expression", "array_creation_expression", "cast_expression",
             "instanceof_expression"):
        for child in node.children:
            if child.node_type not in _TYPE_NODES:
                _collect(child, out)
        return
    if t == "class_literal":
        return
    for child in node.children:
        _collect(child, out)


def defs_uses_of(node: AstNode) -> DefsUses:
    """Defined and used variable names of one statement unit (its subtree root)."""
    out = DefsUses()
    if node.node_type == "method_header":
        for child in node.children:
            if child.node_type == "formal_parameters":
                for param in child.children:
                    if param.node_type in ("formal_parameter", "spread_parameter"):
                        _collect(param, out)
        return out
    _collect(node, out)
    return out


def reaching_definitions(cfg: Cfg, defs_uses: Dict[int, DefsUses]) -> List[DefUsePair]:
    """
    Forward may-reach analysis: IN[n] = union of OUT[p]; OUT[n] = GEN[n] | (IN[n] - KILL[n]).
    Iterates round-robin in source order until nothing changes.
    """
    nodes = cfg.all_nodes()
    preds = cfg.predecessors()
    empty = DefsUses()
    all_defs: Dict[str, Set[Definition]] = {}
    for n in cfg.nodes:
        for var in defs_uses.get(n, empty).defs:
            all_defs.setdefault(var, set()).add((n, var))

    gen: Dict[int, FrozenSet[Definition]] = {}
    kill: Dict[int, FrozenSet[Definition]] = {}
    for n in nodes:
        du = defs_uses.get(n, empty)
        gen[n] = frozenset((n, v) for v in du.defs)
        killed: Set[Definition] = set()
        for v in du.defs:
            killed |= all_defs.get(v, set())
        kill[n] = frozenset(killed - gen[n])

    in_: Dict[int, FrozenSet[Definition]] = {n: frozenset() for n in nodes}
    out: Dict[int, FrozenSet[Definition]] = {n: gen[n] for n in nodes}
    limit = max(len(nodes) ** 2, 4)
    rounds = 0
    changed = True
    while changed:
        rounds += 1
        if rounds > limit:
            raise NonTermination(f"reaching definitions did not converge in {limit} rounds")
        changed = False
        for n in nodes:
            merged: Set[Definition] = set()
            for p in preds.get(n, ()):
                merged |= out[p]
            new_in = frozenset(merged)
            new_out = gen[n] | (new_in - kill[n])
            if new_in != in_[n] or new_out != out[n]:
                in_[n] = new_in
                out[n] = new_out
                changed = True

    pairs: Set[DefUsePair] = set()
    for n in cfg.nodes:
        for var in defs_uses.get(n, empty).uses:
            for d, v in in_[n]:
                if v == var:
                    pairs.add((d, n, var))
    return sorted(pairs)


def data_flow_edges(pairs: List[DefUsePair]) -> List[Tuple[int, int]]:
    """DF edges between units, deduplicated across variables."""
    return sorted({(d, u) for d, u, _ in pairs})


def collect_defs_uses(unit_roots: Dict[int, AstNode], original: Optional[Dict[int, AstNode]] = None) -> Dict[int, DefsUses]:
    """
    Map placeholder id -> DefsUses. `unit_roots` maps placeholder id to the subtree root;
    when `original` (T before sub-token insertion, by node id) is given, names are read
    from it so split identifiers keep their exact spelling.
    """
    out: Dict[int, DefsUses] = {}
    for pid, root in unit_roots.items():
        node = original.get(root.id, root) if original else root
        out[pid] = defs_uses_of(node)
    return out
