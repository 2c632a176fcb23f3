"""
Typed syntax tree and the linearized node sequence built from it.
"""
import copy
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple


@dataclass(eq=False)
class AstNode:
    id: int
    node_type: str
    token: str = ""
    children: List["AstNode"] = field(default_factory=list)
    span: Tuple[int, int] = (0, 0)
    attrs: Dict[str, str] = field(default_factory=dict)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def child_ids(self) -> List[int]:
        return [c.id for c in self.children]

    def walk(self) -> Iterator["AstNode"]:
        """Pre-order traversal."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def walk_with_parents(self) -> Iterator[Tuple["AstNode", Tuple["AstNode", ...]]]:
        """Pre-order traversal yielding (node, ancestor chain root..parent)."""
        stack: List[Tuple[AstNode, Tuple[AstNode, ...]]] = [(self, ())]
        while stack:
            node, chain = stack.pop()
            yield node, chain
            below = chain + (node,)
            stack.extend((c, below) for c in reversed(node.children))

    def size(self) -> int:
        return sum(1 for _ in self.walk())

    def find(self, node_id: int) -> Optional["AstNode"]:
        for node in self.walk():
            if node.id == node_id:
                return node
        return None

    def index(self) -> Dict[int, "AstNode"]:
        return {node.id: node for node in self.walk()}

    def tokens(self) -> List[str]:
        return [n.token for n in self.walk() if n.token]

    def text(self) -> str:
        return " ".join(self.tokens())

    def clone(self) -> "AstNode":
        return copy.deepcopy(self)

    def to_dict(self) -> dict:
        out = {
            "id": self.id,
            "node_type": self.node_type,
            "token": self.token,
            "children": self.child_ids,
            "span": list(self.span),
        }
        if self.attrs:
            out["attrs"] = dict(self.attrs)
        return out


def tree_to_json(root: AstNode) -> dict:
    return {"root": root.id, "nodes": [n.to_dict() for n in root.walk()]}


def tree_from_json(data: dict) -> AstNode:
    records = {rec["id"]: rec for rec in data["nodes"]}
    built: Dict[int, AstNode] = {}

    def build(node_id: int) -> AstNode:
        rec = records[node_id]
        node = AstNode(rec["id"], rec["node_type"], rec.get("token", ""),
                       span=tuple(rec.get("span", (0, 0))), attrs=dict(rec.get("attrs", {})))
        built[node_id] = node
        node.children = [build(c) for c in rec["children"]]
        return node

    return build(data["root"])


@dataclass
class LinearSeq:
    nodes: List[int]
    token_positions: List[int]
    node_types: List[str] = field(default_factory=list)
    tokens: List[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.nodes)

    def token_stream(self) -> List[str]:
        return [self.tokens[i] for i in self.token_positions]

    def to_dict(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "token_positions": list(self.token_positions),
            "node_types": list(self.node_types),
            "tokens": list(self.tokens),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LinearSeq":
        return cls(list(data["nodes"]), list(data["token_positions"]),
                   list(data.get("node_types", [])), list(data.get("tokens", [])))
