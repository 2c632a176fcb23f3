"""
Sub-token splitting and AST linearization.
"""
import re
from typing import List

from hierarchynet.modules.syntax.astNode import AstNode, LinearSeq
from hierarchynet.modules.syntax.javaLexer import STR_TOKEN

_IDENTIFIER = re.compile(r"^[A-Za-z_$][A-Za-z0-9_$]*$")
_PIECES = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|[0-9]+")

SUB_TOKEN = "sub_token"


def split_subtokens(token: str) -> List[str]:
    """
    Split an identifier on camelCase, underscores and digit/letter transitions,
    lowercasing every piece. Non-identifier tokens come back as a single element:
    punctuation and `<str>` unchanged, numeric and character literals lowercased.
    """
    if not _IDENTIFIER.match(token):
        if token == STR_TOKEN or not re.search(r"[A-Za-z]", token):
            return [token]
        return [token.lower()]
    pieces = _PIECES.findall(token)
    if not pieces:
        return [token.lower()]
    return [p.lower() for p in pieces]


def insert_subtoken_nodes(tree: AstNode) -> AstNode:
    """
    Give every leaf whose token splits into several pieces one `sub_token` child per
    piece, clearing the parent's token. Single-piece tokens are lowercased in place.
    Returns a new tree; the input is left untouched.
    """
    root = tree.clone()
    next_id = max(n.id for n in root.walk()) + 1
    for node in list(root.walk()):
        if not node.is_leaf or not node.token:
            continue
        pieces = split_subtokens(node.token)
        if len(pieces) == 1:
            node.token = pieces[0]
            continue
        start, end = node.span
        children = []
        for piece in pieces:
            children.append(AstNode(next_id, SUB_TOKEN, piece, [], (start, end)))
            next_id += 1
        node.children = children
        node.token = ""
    return root


def linearize(tree: AstNode) -> LinearSeq:
    """Pre-order sequence L of the (sub-tokenized) tree."""
    nodes: List[int] = []
    types: List[str] = []
    tokens: List[str] = []
    positions: List[int] = []
    for i, node in enumerate(tree.walk()):
        nodes.append(node.id)
        types.append(node.node_type)
        tokens.append(node.token)
        if node.token:
            positions.append(i)
    return LinearSeq(nodes, positions, types, tokens)
