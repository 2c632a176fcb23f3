"""
Subtree rules: which AST nodes become statement/expression subtrees.

    OUTPUT : method_header | simple_statement | expression

Simple statements are extracted wherever they occur. Expressions are extracted
only in compound-statement head positions (conditions, for clauses, switch
selectors and case labels, resources); anything nested deeper already belongs
to the enclosing statement's subtree.
"""
from typing import Optional, Sequence

from hierarchynet.modules.syntax.astNode import AstNode

METHOD_HEADER = "method_header"

SIMPLE_STATEMENT_KINDS = frozenset((
    "variable_declaration", "return_statement", "method_invocation", "assignment_statement",
    "break_statement", "continue_statement", "throw_statement", "expression_statement",
))
EXPRESSION_KINDS = frozenset((
    "ternary_expression", "assignment_expression", "instanceof_expression", "cast_expression",
    "binary_expression", "unary_expression", "resource_specification", "update_expression",
    "primary_expression",
))
OUTPUT_KINDS = frozenset((METHOD_HEADER,)) | SIMPLE_STATEMENT_KINDS | EXPRESSION_KINDS

COMPOUND_STATEMENTS = frozenset((
    "if_statement", "while_statement", "for_statement", "dowhile_statement",
    "switchcase_statement", "try_statement", "try_with_resources_statement",
))

EXPRESSION_TYPES = frozenset((
    "assignment_expression", "ternary_expression", "binary_expression", "instanceof_expression",
    "unary_expression", "update_expression", "cast_expression", "parenthesized_expression",
    "method_invocation", "field_access", "array_access", "class_literal",
    "object_creation_expression", "array_creation_expression",
    "identifier", "this", "super",
    "integer_literal", "floating_point_literal", "string_literal", "character_literal",
    "boolean_literal", "null_literal",
))
_SELF_NAMED = frozenset((
    "ternary_expression", "assignment_expression", "instanceof_expression", "cast_expression",
    "binary_expression", "unary_expression", "update_expression",
))
# Parents whose direct expression children sit in a head position.
HEAD_PARENTS = frozenset((
    "if_statement", "while_statement", "dowhile_statement", "for_statement",
    "switchcase_statement", "switch_label",
))


def expression_kind(node: AstNode) -> str:
    if node.node_type in _SELF_NAMED:
        return node.node_type
    return "primary_expression"


def statement_kind(node: AstNode) -> Optional[str]:
    t = node.node_type
    if t == "expression_statement":
        inner = node.children[0].node_type if node.children else ""
        if inner == "method_invocation":
            return "method_invocation"
        if inner == "assignment_expression":
            return "assignment_statement"
        return "expression_statement"
    if t in SIMPLE_STATEMENT_KINDS:
        return t
    return None


def classify_subtree_root(node: AstNode, context: Sequence[AstNode]) -> Optional[str]:
    """
    Return the subtree kind if `node` matches an OUTPUT production in its position.
    `context` is the ancestor chain from the method root down to the parent.
    """
    parent = context[-1] if context else None
    if node.node_type == METHOD_HEADER:
        return METHOD_HEADER
    kind = statement_kind(node)
    if kind is not None:
        return kind
    if parent is None:
        return None
    if node.node_type == "resource_specification" and parent.node_type == "try_with_resources_statement":
        return "resource_specification"
    if parent.node_type in HEAD_PARENTS and node.node_type in EXPRESSION_TYPES:
        return expression_kind(node)
    return None
