"""
Intraprocedural control-flow graph over statement-level units (subtree placeholders
of T'), the substrate for reaching definitions.
"""
import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

from hierarchynet.modules.hierarchy.extractHierarchy import PLACEHOLDER, ReducedTree
from hierarchynet.modules.syntax.astNode import AstNode

ENTRY = -1
EXIT = -2


@dataclass
class Cfg:
    nodes: List[int]
    succ: Dict[int, Set[int]] = field(default_factory=dict)
    entry: int = ENTRY
    exit: int = EXIT

    def add_edge(self, src: int, dst: int) -> None:
        self.succ.setdefault(src, set()).add(dst)
        self.succ.setdefault(dst, set())

    def successors(self, node: int) -> List[int]:
        return sorted(self.succ.get(node, ()))

    def predecessors(self) -> Dict[int, Set[int]]:
        preds: Dict[int, Set[int]] = {n: set() for n in self.all_nodes()}
        for src, dsts in self.succ.items():
            for dst in dsts:
                preds.setdefault(dst, set()).add(src)
        return preds

    def all_nodes(self) -> List[int]:
        return [self.entry] + list(self.nodes) + [self.exit]

    def edges(self) -> List[Tuple[int, int]]:
        return sorted((s, d) for s, dsts in self.succ.items() for d in dsts)

    def reachable(self) -> Set[int]:
        seen = {self.entry}
        stack = [self.entry]
        while stack:
            for nxt in self.succ.get(stack.pop(), ()):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen


# ---------------------------------------------------------------------------------------
# structural helpers shared with the dependence builders

def is_unit(node: AstNode) -> bool:
    return node.node_type == PLACEHOLDER


def unit_kind(node: AstNode) -> str:
    return node.attrs.get("kind", "")


def paren_heads(node: AstNode) -> List[AstNode]:
    """Children between the first '(' and its ')' of a compound statement."""
    out: List[AstNode] = []
    inside = False
    for child in node.children:
        if child.is_leaf and child.token == "(" and not inside:
            inside = True
            continue
        if child.is_leaf and child.token == ")" and inside:
            break
        if inside and is_unit(child):
            out.append(child)
    return out


def for_sections(node: AstNode) -> Tuple[List[AstNode], Optional[AstNode], List[AstNode], AstNode]:
    """(init units, condition unit or None, update units, body) of a for_statement."""
    init: List[AstNode] = []
    cond: Optional[AstNode] = None
    update: List[AstNode] = []
    section = 0
    closed = False
    body = node.children[-1]
    for child in node.children[2:-1]:
        if child.is_leaf and child.token == ";":
            section += 1
            continue
        if child.is_leaf and child.token == ")":
            closed = True
            continue
        if closed or not is_unit(child):
            continue
        if section == 0:
            init.append(child)
        elif section == 1:
            cond = child
        else:
            update.append(child)
    return init, cond, update, body


def compound_parts(node: AstNode) -> Tuple[List[AstNode], List[AstNode], List[AstNode]]:
    """
    Split a compound statement into (head units, governed bodies, ungoverned bodies).
    Bodies are statements or blocks.
    """
    t = node.node_type
    if t in ("if_statement", "while_statement"):
        heads = paren_heads(node)
        after = node.children[node.children.index(_closing_paren(node)) + 1:]
        bodies = [c for c in after if not (c.is_leaf and c.token == "else")]
        return heads, bodies, []
    if t == "dowhile_statement":
        return paren_heads(node), [node.children[1]], []
    if t == "for_statement":
        init, cond, update, body = for_sections(node)
        heads = init + ([cond] if cond is not None else []) + update
        return heads, [body], []
    if t == "switchcase_statement":
        return paren_heads(node), [node.children[-1]], []
    if t in ("try_statement", "try_with_resources_statement"):
        heads = [c for c in node.children if is_unit(c)]
        governed: List[AstNode] = []
        free: List[AstNode] = []
        for c in node.children:
            if c.node_type == "block":
                governed.append(c)
            elif c.node_type == "catch_clause":
                governed.append(c.children[-1])
            elif c.node_type == "finally_clause":
                free.append(c.children[-1])
        return heads, governed, free
    return [], [], []


def _closing_paren(node: AstNode) -> AstNode:
    depth = 0
    for child in node.children:
        if child.is_leaf and child.token == "(":
            depth += 1
        elif child.is_leaf and child.token == ")":
            depth -= 1
            if depth == 0:
                return child
    raise ValueError(f"{node.node_type} without head parentheses")


def statement_list(node: AstNode) -> List[AstNode]:
    """Statements of a block, or the single statement used as a body."""
    if node.node_type == "block":
        return [c for c in node.children if not (c.is_leaf and c.token in ("{", "}"))]
    return [node]


# ---------------------------------------------------------------------------------------

class _CfgBuilder:
    def __init__(self, cfg: Cfg):
        self.cfg = cfg
        self.loops: List[dict] = []       # {"breaks": set, "continues": set, "loop": bool}
        self.try_members: List[Set[int]] = []
        self._sentinels = itertools.count(-100, -1)

    def link(self, preds: Set[int], node: int) -> None:
        for p in preds:
            self.cfg.add_edge(p, node)

    def unit(self, node: AstNode, preds: Set[int]) -> Set[int]:
        nid = node.id
        self.cfg.nodes.append(nid)
        self.cfg.succ.setdefault(nid, set())
        self.link(preds, nid)
        for members in self.try_members:
            members.add(nid)
        kind = unit_kind(node)
        if kind in ("return_statement", "throw_statement"):
            self.cfg.add_edge(nid, EXIT)
            return set()
        if kind == "break_statement" and self.loops:
            self.loops[-1]["breaks"].add(nid)
            return set()
        if kind == "continue_statement":
            for ctx in reversed(self.loops):
                if ctx["loop"]:
                    ctx["continues"].add(nid)
                    return set()
        return {nid}

    def with_entries(self, node: AstNode, preds: Set[int]) -> Tuple[Set[int], Set[int]]:
        """Build `node` and also report the nodes it is entered through."""
        sentinel = next(self._sentinels)
        exits = self.stmt(node, {sentinel})
        entries = set(self.cfg.succ.pop(sentinel, set()))
        for e in entries:
            self.link(preds, e)
        if sentinel in exits:
            exits = (exits - {sentinel}) | preds
        return exits, entries

    def seq(self, nodes: List[AstNode], preds: Set[int]) -> Set[int]:
        for node in nodes:
            preds = self.stmt(node, preds)
        return preds

    def stmt(self, node: AstNode, preds: Set[int]) -> Set[int]:
        t = node.node_type
        if is_unit(node):
            return self.unit(node, preds)
        if t == "block":
            return self.seq(statement_list(node), preds)
        if t == "if_statement":
            heads, bodies, _ = compound_parts(node)
            cond = self.seq(heads, preds)
            exits = self.stmt(bodies[0], cond)
            if len(bodies) > 1:
                return exits | self.stmt(bodies[1], cond)
            return exits | cond
        if t == "while_statement":
            heads, bodies, _ = compound_parts(node)
            cond = self.seq(heads, preds)
            ctx = self.push_loop()
            body_exits = self.stmt(bodies[0], cond)
            self.loops.pop()
            for src in body_exits | ctx["continues"]:
                for h in heads[:1]:
                    self.cfg.add_edge(src, h.id)
            return cond | ctx["breaks"]
        if t == "dowhile_statement":
            heads, bodies, _ = compound_parts(node)
            ctx = self.push_loop()
            body_exits, entries = self.with_entries(bodies[0], preds)
            self.loops.pop()
            cond = self.seq(heads, body_exits | ctx["continues"])
            for src in cond:
                for e in entries or {h.id for h in heads[:1]}:
                    self.cfg.add_edge(src, e)
            return cond | ctx["breaks"]
        if t == "for_statement":
            init, cond, update, body = for_sections(node)
            head_exits = self.seq(init, preds)
            ctx = self.push_loop()
            if cond is not None:
                cond_exits = self.unit(cond, head_exits)
                body_exits, entries = self.with_entries(body, cond_exits)
                loop_head = {cond.id}
            else:
                body_exits, entries = self.with_entries(body, head_exits)
                loop_head = entries
            self.loops.pop()
            tail = self.seq(update, body_exits | ctx["continues"])
            for src in tail:
                for h in loop_head:
                    self.cfg.add_edge(src, h)
            if cond is not None:
                return {cond.id} | ctx["breaks"]
            return ctx["breaks"]
        if t == "switchcase_statement":
            heads, bodies, _ = compound_parts(node)
            selector = self.seq(heads, preds)
            ctx = {"breaks": set(), "continues": set(), "loop": False}
            self.loops.append(ctx)
            fall: Set[int] = set()
            has_default = False
            for group in bodies[0].children:
                if group.node_type != "switch_block_statement_group":
                    continue
                entry: Set[int] = set()
                for child in group.children:
                    if child.node_type != "switch_label":
                        continue
                    labels = [c for c in child.children if is_unit(c)]
                    if not labels:
                        has_default = True
                        entry |= selector
                    for lab in labels:
                        entry |= self.unit(lab, selector)
                stmts = [c for c in group.children if c.node_type != "switch_label"]
                fall = self.seq(stmts, entry | fall)
            self.loops.pop()
            exits = fall | ctx["breaks"]
            if not has_default:
                exits |= selector
            return exits
        if t in ("try_statement", "try_with_resources_statement"):
            heads, governed, free = compound_parts(node)
            head_exits = self.seq(heads, preds)
            members: Set[int] = set()
            self.try_members.append(members)
            try_exits = self.stmt(governed[0], head_exits)
            self.try_members.pop()
            handler_preds = members | ({h.id for h in heads} if heads else set())
            if not handler_preds:
                handler_preds = set(head_exits)
            exits = set(try_exits)
            for catch_body in governed[1:]:
                exits |= self.stmt(catch_body, handler_preds)
            for fin in free:
                exits = self.stmt(fin, exits)
            return exits
        # empty_statement and other scaffolding
        return preds

    def push_loop(self) -> dict:
        ctx = {"breaks": set(), "continues": set(), "loop": True}
        self.loops.append(ctx)
        return ctx


def build_cfg(t_prime: ReducedTree) -> Cfg:
    """
    Statement-level CFG: sequential fallthrough, branches for if/switch, back-edges for
    loops, and edges from every unit of a try block to each catch clause entry.
    """
    cfg = Cfg(nodes=[])
    cfg.succ[ENTRY] = set()
    cfg.succ[EXIT] = set()
    builder = _CfgBuilder(cfg)
    root = t_prime.root
    preds = {ENTRY}
    for child in root.children:
        preds = builder.stmt(child, preds)
    for p in preds:
        cfg.add_edge(p, EXIT)

    # Dead code after return/break still needs a path from entry.
    order = {n.id: i for i, n in enumerate(root.walk())}
    cfg.nodes.sort(key=lambda n: order[n])
    reach = cfg.reachable()
    for nid in cfg.nodes:
        if nid not in reach:
            cfg.add_edge(ENTRY, nid)
            reach = cfg.reachable()
    return cfg
