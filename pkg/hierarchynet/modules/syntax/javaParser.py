"""
Java Method Parser
Recursive-descent parser for the statement/expression subset a single Java
method declaration may use. Every lexer token becomes exactly one leaf, so the
leaves of the returned tree reproduce the token stream in order.
"""
from typing import Callable, List, Optional, Tuple

from hierarchynet.modules.syntax.astNode import AstNode
from hierarchynet.modules.syntax.javaLexer import Token, tokenize
from hierarchynet.utils.errors import JavaSyntaxError, UnsupportedConstruct

PRIMITIVE_TYPES = frozenset(("boolean", "byte", "char", "short", "int", "long", "float", "double"))
MODIFIERS = frozenset((
    "public", "private", "protected", "static", "final", "abstract", "synchronized",
    "native", "strictfp", "transient", "volatile", "default",
))
ASSIGNMENT_OPS = frozenset(("=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="))
BINARY_LEVELS = (
    ("||",),
    ("&&",),
    ("|",),
    ("^",),
    ("&",),
    ("==", "!="),
    ("<", ">", "<=", ">=", "instanceof"),
    ("<<", ">>", ">>>"),
    ("+", "-"),
    ("*", "/", "%"),
)
LITERAL_TYPES = {
    "integer": "integer_literal",
    "float": "floating_point_literal",
    "string": "string_literal",
    "char": "character_literal",
}
UNSUPPORTED_STATEMENTS = {
    "goto": "goto_statement",
    "synchronized": "synchronized_statement",
    "assert": "assert_statement",
    "class": "local_class_declaration",
    "interface": "local_class_declaration",
    "enum": "local_class_declaration",
}
OPERAND_STARTS = frozenset(("identifier", "integer", "float", "string", "char"))
OPERAND_KEYWORDS = frozenset(("this", "super", "new", "true", "false", "null"))

# Named node types the parser can produce; leaves of keywords and punctuation are
# typed by their own text and enumerated separately in `grammar_vocabulary()`.
NAMED_NODE_TYPES = (
    "method_declaration", "method_header", "modifiers", "annotation", "formal_parameters",
    "formal_parameter", "spread_parameter", "throws", "block",
    "variable_declaration", "variable_declarator", "array_initializer",
    "expression_statement", "return_statement", "break_statement", "continue_statement",
    "throw_statement", "empty_statement",
    "if_statement", "while_statement", "for_statement", "dowhile_statement",
    "switchcase_statement", "switch_block", "switch_block_statement_group", "switch_label",
    "try_statement", "try_with_resources_statement", "resource_specification", "resource",
    "catch_clause", "catch_formal_parameter", "catch_type", "finally_clause",
    "assignment_expression", "ternary_expression", "binary_expression", "instanceof_expression",
    "unary_expression", "update_expression", "cast_expression", "parenthesized_expression",
    "method_invocation", "argument_list", "field_access", "array_access", "class_literal",
    "object_creation_expression", "array_creation_expression", "dimensions_expr", "dimensions",
    "primitive_type", "void_type", "type_identifier", "scoped_type_identifier", "generic_type",
    "type_arguments", "wildcard", "array_type",
    "identifier", "this", "super",
    "integer_literal", "floating_point_literal", "string_literal", "character_literal",
    "boolean_literal", "null_literal",
    "sub_token", "subtree_placeholder",
)


def grammar_vocabulary() -> List[str]:
    """Every node_type a parsed (and sub-tokenized / reduced) tree can carry."""
    from hierarchynet.modules.syntax.javaLexer import KEYWORDS, OPERATORS
    leaf_texts = sorted(set(KEYWORDS) | set(OPERATORS))
    return list(NAMED_NODE_TYPES) + [t for t in leaf_texts if t not in NAMED_NODE_TYPES]


class JavaMethodParser:
    def __init__(self, source: str):
        self.source = source
        self.tokens: List[Token] = tokenize(source)
        self.pos = 0
        self._splits: List[Tuple[int, Token]] = []

    # ---------------------------------------------------------------------------------
    # token helpers

    @property
    def tok(self) -> Optional[Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def peek(self, k: int = 1) -> Optional[Token]:
        i = self.pos + k
        return self.tokens[i] if i < len(self.tokens) else None

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t is not None and t.kind in ("op", "keyword") and t.text in texts

    def at_kind(self, kind: str) -> bool:
        t = self.tok
        return t is not None and t.kind == kind

    def _here(self):
        t = self.tok
        if t is None:
            end = len(self.source)
            return (end, end)
        return t.span

    def error(self, message: str) -> JavaSyntaxError:
        t = self.tok
        got = "end of input" if t is None else repr(t.text)
        return JavaSyntaxError(self._here(), f"{message}, got {got}")

    def unsupported(self, construct: str) -> UnsupportedConstruct:
        return UnsupportedConstruct(self._here(), construct)

    def leaf(self, node_type: Optional[str] = None) -> AstNode:
        t = self.tok
        if t is None:
            raise self.error("unexpected end of method")
        self.pos += 1
        if node_type is None:
            node_type = _leaf_type(t)
        return AstNode(-1, node_type, t.text, [], t.span)

    def expect(self, text: str) -> AstNode:
        if not self.at(text):
            raise self.error(f"expected {text!r}")
        return self.leaf()

    def expect_identifier(self) -> AstNode:
        if not self.at_kind("identifier"):
            raise self.error("expected identifier")
        return self.leaf("identifier")

    def save(self) -> Tuple[int, int]:
        return self.pos, len(self._splits)

    def restore(self, state: Tuple[int, int]) -> None:
        pos, n_splits = state
        while len(self._splits) > n_splits:
            i, original = self._splits.pop()
            self.tokens[i:i + 2] = [original]
        self.pos = pos

    def speculate(self, probe: Callable[[], bool]) -> bool:
        state = self.save()
        try:
            return probe()
        except (JavaSyntaxError, UnsupportedConstruct):
            return False
        finally:
            self.restore(state)

    def split_closing_angle(self) -> None:
        """`>>` / `>>>` closing nested type arguments are split into single `>`."""
        t = self.tok
        if t is not None and t.kind == "op" and t.text.startswith(">") and t.text != ">":
            first = Token("op", ">", t.start, t.start + 1)
            rest = Token("op", t.text[1:], t.start + 1, t.end)
            self.tokens[self.pos:self.pos + 1] = [first, rest]
            self._splits.append((self.pos, t))

    # ---------------------------------------------------------------------------------
    # entry

    def parse(self) -> AstNode:
        header = self.parse_method_header()
        if self.at(";"):
            raise self.error("method has no body")
        body = self.parse_block()
        if self.tok is not None:
            raise self.error("trailing tokens after method body")
        root = _node("method_declaration", [header, body])
        _renumber(root)
        return root

    def parse_method_header(self) -> AstNode:
        children: List[AstNode] = []
        mods = self.parse_modifiers()
        if mods is not None:
            children.append(mods)
        if self.at("<"):
            raise self.unsupported("type_parameters")
        if self.at("void"):
            children.append(self.leaf("void_type"))
        else:
            children.append(self.parse_type())
        children.append(self.expect_identifier())
        children.append(self.parse_formal_parameters())
        if self.at("["):
            children.append(self.parse_dimensions())
        if self.at("throws"):
            throws = [self.leaf()]
            throws.append(self.parse_type())
            while self.at(","):
                throws.append(self.leaf())
                throws.append(self.parse_type())
            children.append(_node("throws", throws))
        return _node("method_header", children)

    def parse_modifiers(self) -> Optional[AstNode]:
        items: List[AstNode] = []
        while True:
            if self.at(*MODIFIERS):
                items.append(self.leaf())
            elif self.at("@"):
                items.append(self.parse_annotation())
            else:
                break
        return _node("modifiers", items) if items else None

    def parse_annotation(self) -> AstNode:
        children = [self.expect("@")]
        if self.at("interface"):
            raise self.unsupported("annotation_type_declaration")
        children.append(self.expect_identifier())
        while self.at("."):
            children.append(self.leaf())
            children.append(self.expect_identifier())
        if self.at("("):
            children.append(self.parse_argument_list())
        return _node("annotation", children)

    def parse_formal_parameters(self) -> AstNode:
        children = [self.expect("(")]
        if not self.at(")"):
            children.append(self.parse_formal_parameter())
            while self.at(","):
                children.append(self.leaf())
                children.append(self.parse_formal_parameter())
        children.append(self.expect(")"))
        return _node("formal_parameters", children)

    def parse_formal_parameter(self) -> AstNode:
        children: List[AstNode] = []
        mods = self.parse_modifiers()
        if mods is not None:
            children.append(mods)
        children.append(self.parse_type())
        node_type = "formal_parameter"
        if self.at("..."):
            children.append(self.leaf())
            node_type = "spread_parameter"
        children.append(self.expect_identifier())
        if self.at("["):
            children.append(self.parse_dimensions())
        return _node(node_type, children)

    # ---------------------------------------------------------------------------------
    # types

    def parse_type(self, allow_array: bool = True) -> AstNode:
        if self.tok is not None and self.tok.kind == "keyword" and self.tok.text in PRIMITIVE_TYPES:
            base = self.leaf("primitive_type")
        elif self.at_kind("identifier"):
            base = self.leaf("type_identifier")
            if self.at(".") and self.peek() is not None and self.peek().kind == "identifier":
                parts = [base]
                while self.at(".") and self.peek() is not None and self.peek().kind == "identifier":
                    parts.append(self.leaf())
                    parts.append(self.leaf("type_identifier"))
                base = _node("scoped_type_identifier", parts)
            if self.at("<"):
                base = _node("generic_type", [base, self.parse_type_arguments()])
        else:
            raise self.error("expected type")
        if allow_array and self.at("[") and self.peek() is not None and self.peek().text == "]":
            base = _node("array_type", [base, self.parse_dimensions()])
        return base

    def parse_type_arguments(self) -> AstNode:
        children = [self.expect("<")]
        self.split_closing_angle()
        if not self.at(">"):
            children.append(self.parse_type_argument())
            while self.at(","):
                children.append(self.leaf())
                children.append(self.parse_type_argument())
        self.split_closing_angle()
        children.append(self.expect(">"))
        return _node("type_arguments", children)

    def parse_type_argument(self) -> AstNode:
        if self.at("?"):
            children = [self.leaf()]
            if self.at("extends", "super"):
                children.append(self.leaf())
                children.append(self.parse_type())
            return _node("wildcard", children)
        return self.parse_type()

    def parse_dimensions(self) -> AstNode:
        children: List[AstNode] = []
        while self.at("[") and self.peek() is not None and self.peek().text == "]":
            children.append(self.leaf())
            children.append(self.leaf())
        if not children:
            raise self.error("expected '[]'")
        return _node("dimensions", children)

    # ---------------------------------------------------------------------------------
    # statements

    def parse_block(self) -> AstNode:
        children = [self.expect("{")]
        while not self.at("}"):
            if self.tok is None:
                raise self.error("expected '}'")
            children.append(self.parse_statement())
        children.append(self.leaf())
        return _node("block", children)

    def looks_like_declaration(self) -> bool:
        def probe() -> bool:
            self.parse_modifiers()
            self.parse_type()
            if not self.at_kind("identifier"):
                return False
            nxt = self.peek()
            return nxt is not None and nxt.text in ("=", ";", ",", "[", ":", ")")
        return self.speculate(probe)

    def parse_statement(self) -> AstNode:
        t = self.tok
        if t is None:
            raise self.error("expected statement")
        if t.kind == "keyword" and t.text in UNSUPPORTED_STATEMENTS:
            if t.text != "synchronized" or (self.peek() is not None and self.peek().text == "("):
                raise self.unsupported(UNSUPPORTED_STATEMENTS[t.text])
        if t.kind == "identifier" and self.peek() is not None and self.peek().text == ":":
            raise self.unsupported("labeled_statement")
        if self.at("{"):
            return self.parse_block()
        if self.at(";"):
            return _node("empty_statement", [self.leaf()])
        if self.at("if"):
            return self.parse_if()
        if self.at("while"):
            return self.parse_while()
        if self.at("for"):
            return self.parse_for()
        if self.at("do"):
            return self.parse_do()
        if self.at("switch"):
            return self.parse_switch()
        if self.at("try"):
            return self.parse_try()
        if self.at("return"):
            children = [self.leaf()]
            if not self.at(";"):
                children.append(self.parse_expression())
            children.append(self.expect(";"))
            return _node("return_statement", children)
        if self.at("break", "continue"):
            kind = "break_statement" if t.text == "break" else "continue_statement"
            children = [self.leaf()]
            if self.at_kind("identifier"):
                raise self.unsupported("labeled_" + t.text)
            children.append(self.expect(";"))
            return _node(kind, children)
        if self.at("throw"):
            children = [self.leaf(), self.parse_expression(), self.expect(";")]
            return _node("throw_statement", children)
        if self.at("final", "@") or self.looks_like_declaration():
            decl = self.parse_variable_declaration()
            decl.children.append(self.expect(";"))
            decl.span = (decl.span[0], decl.children[-1].span[1])
            return decl
        expr = self.parse_expression()
        return _node("expression_statement", [expr, self.expect(";")])

    def parse_variable_declaration(self) -> AstNode:
        children: List[AstNode] = []
        mods = self.parse_modifiers()
        if mods is not None:
            children.append(mods)
        children.append(self.parse_type())
        children.append(self.parse_variable_declarator())
        while self.at(","):
            children.append(self.leaf())
            children.append(self.parse_variable_declarator())
        return _node("variable_declaration", children)

    def parse_variable_declarator(self) -> AstNode:
        children = [self.expect_identifier()]
        if self.at("["):
            children.append(self.parse_dimensions())
        if self.at("="):
            children.append(self.leaf())
            if self.at("{"):
                children.append(self.parse_array_initializer())
            else:
                children.append(self.parse_expression())
        return _node("variable_declarator", children)

    def parse_array_initializer(self) -> AstNode:
        children = [self.expect("{")]
        while not self.at("}"):
            if self.at("{"):
                children.append(self.parse_array_initializer())
            else:
                children.append(self.parse_expression())
            if self.at(","):
                children.append(self.leaf())
            elif not self.at("}"):
                raise self.error("expected ',' or '}' in array initializer")
        children.append(self.leaf())
        return _node("array_initializer", children)

    def parse_parenthesized_head(self) -> List[AstNode]:
        return [self.expect("("), self.parse_expression(), self.expect(")")]

    def parse_if(self) -> AstNode:
        children = [self.leaf()] + self.parse_parenthesized_head()
        children.append(self.parse_statement())
        if self.at("else"):
            children.append(self.leaf())
            children.append(self.parse_statement())
        return _node("if_statement", children)

    def parse_while(self) -> AstNode:
        children = [self.leaf()] + self.parse_parenthesized_head()
        children.append(self.parse_statement())
        return _node("while_statement", children)

    def parse_do(self) -> AstNode:
        children = [self.leaf(), self.parse_statement(), self.expect("while")]
        children += self.parse_parenthesized_head()
        children.append(self.expect(";"))
        return _node("dowhile_statement", children)

    def parse_for(self) -> AstNode:
        children = [self.leaf(), self.expect("(")]
        if not self.at(";"):
            if self.at("final", "@") or self.looks_like_declaration():
                state = self.save()
                self.parse_modifiers()
                self.parse_type()
                self.expect_identifier()
                if self.at(":"):
                    raise self.unsupported("enhanced_for_statement")
                self.restore(state)
                children.append(self.parse_variable_declaration())
            else:
                children.extend(self.parse_expression_list())
        children.append(self.expect(";"))
        if not self.at(";"):
            children.append(self.parse_expression())
        children.append(self.expect(";"))
        if not self.at(")"):
            children.extend(self.parse_expression_list())
        children.append(self.expect(")"))
        children.append(self.parse_statement())
        return _node("for_statement", children)

    def parse_expression_list(self) -> List[AstNode]:
        items = [self.parse_expression()]
        while self.at(","):
            items.append(self.leaf())
            items.append(self.parse_expression())
        return items

    def parse_switch(self) -> AstNode:
        children = [self.leaf()] + self.parse_parenthesized_head()
        block = [self.expect("{")]
        while not self.at("}"):
            if self.tok is None:
                raise self.error("expected '}'")
            block.append(self.parse_switch_group())
        block.append(self.leaf())
        children.append(_node("switch_block", block))
        return _node("switchcase_statement", children)

    def parse_switch_group(self) -> AstNode:
        children: List[AstNode] = []
        while self.at("case", "default"):
            children.append(self.parse_switch_label())
        if not children:
            raise self.error("expected 'case' or 'default'")
        while not self.at("case", "default", "}"):
            if self.tok is None:
                raise self.error("expected '}'")
            children.append(self.parse_statement())
        return _node("switch_block_statement_group", children)

    def parse_switch_label(self) -> AstNode:
        children = [self.leaf()]
        if children[0].token == "case":
            children.extend(self.parse_expression_list())
        if self.at("->"):
            raise self.unsupported("switch_rule")
        children.append(self.expect(":"))
        return _node("switch_label", children)

    def parse_try(self) -> AstNode:
        children = [self.leaf()]
        node_type = "try_statement"
        if self.at("("):
            node_type = "try_with_resources_statement"
            children.append(self.parse_resource_specification())
        children.append(self.parse_block())
        handlers = 0
        while self.at("catch"):
            children.append(self.parse_catch_clause())
            handlers += 1
        if self.at("finally"):
            children.append(_node("finally_clause", [self.leaf(), self.parse_block()]))
            handlers += 1
        if handlers == 0 and node_type == "try_statement":
            raise self.error("expected 'catch' or 'finally'")
        return _node(node_type, children)

    def parse_resource_specification(self) -> AstNode:
        children = [self.expect("(")]
        children.append(self.parse_resource())
        while self.at(";"):
            children.append(self.leaf())
            if self.at(")"):
                break
            children.append(self.parse_resource())
        children.append(self.expect(")"))
        return _node("resource_specification", children)

    def parse_resource(self) -> AstNode:
        if self.at("final", "@") or self.looks_like_declaration():
            children: List[AstNode] = []
            mods = self.parse_modifiers()
            if mods is not None:
                children.append(mods)
            children += [self.parse_type(), self.expect_identifier(), self.expect("="), self.parse_expression()]
            return _node("resource", children)
        return _node("resource", [self.parse_expression()])

    def parse_catch_clause(self) -> AstNode:
        children = [self.leaf(), self.expect("(")]
        param: List[AstNode] = []
        mods = self.parse_modifiers()
        if mods is not None:
            param.append(mods)
        types = [self.parse_type()]
        while self.at("|"):
            types.append(self.leaf())
            types.append(self.parse_type())
        param.append(_node("catch_type", types))
        param.append(self.expect_identifier())
        children.append(_node("catch_formal_parameter", param))
        children.append(self.expect(")"))
        children.append(self.parse_block())
        return _node("catch_clause", children)

    # ---------------------------------------------------------------------------------
    # expressions

    def lambda_ahead(self) -> bool:
        t = self.tok
        if t is None:
            return False
        if t.kind == "identifier":
            nxt = self.peek()
            return nxt is not None and nxt.text == "->"
        if not self.at("("):
            return False
        depth = 0
        i = self.pos
        while i < len(self.tokens):
            text = self.tokens[i].text
            if self.tokens[i].kind == "op" and text == "(":
                depth += 1
            elif self.tokens[i].kind == "op" and text == ")":
                depth -= 1
                if depth == 0:
                    return i + 1 < len(self.tokens) and self.tokens[i + 1].text == "->"
            i += 1
        return False

    def parse_expression(self) -> AstNode:
        if self.lambda_ahead():
            raise self.unsupported("lambda_expression")
        lhs = self.parse_ternary()
        if self.at(*ASSIGNMENT_OPS):
            op = self.leaf()
            rhs = self.parse_expression()
            return _node("assignment_expression", [lhs, op, rhs])
        return lhs

    def parse_ternary(self) -> AstNode:
        cond = self.parse_binary(0)
        if not self.at("?"):
            return cond
        q = self.leaf()
        then = self.parse_expression()
        colon = self.expect(":")
        other = self.parse_ternary()
        return _node("ternary_expression", [cond, q, then, colon, other])

    def parse_binary(self, level: int) -> AstNode:
        if level == len(BINARY_LEVELS):
            return self.parse_unary()
        left = self.parse_binary(level + 1)
        ops = BINARY_LEVELS[level]
        while self.at(*ops):
            if self.at("instanceof"):
                kw = self.leaf()
                if self.at("final"):
                    raise self.unsupported("instanceof_pattern")
                left = _node("instanceof_expression", [left, kw, self.parse_type()])
                if self.at_kind("identifier"):
                    raise self.unsupported("instanceof_pattern")
                continue
            op = self.leaf()
            right = self.parse_binary(level + 1)
            left = _node("binary_expression", [left, op, right])
        return left

    def looks_like_cast(self) -> bool:
        def probe() -> bool:
            self.expect("(")
            primitive = self.tok is not None and self.tok.text in PRIMITIVE_TYPES
            self.parse_type()
            self.expect(")")
            if primitive:
                return True
            t = self.tok
            if t is None:
                return False
            if t.kind in OPERAND_STARTS:
                return True
            return (t.kind == "keyword" and t.text in OPERAND_KEYWORDS) or (t.kind == "op" and t.text in ("(", "!", "~"))
        return self.speculate(probe)

    def parse_unary(self) -> AstNode:
        if self.at("++", "--"):
            op = self.leaf()
            return _node("update_expression", [op, self.parse_unary()])
        if self.at("+", "-", "!", "~"):
            op = self.leaf()
            return _node("unary_expression", [op, self.parse_unary()])
        if self.at("(") and self.looks_like_cast():
            children = [self.leaf(), self.parse_type(), self.expect(")"), self.parse_unary()]
            return _node("cast_expression", children)
        return self.parse_postfix()

    def parse_postfix(self) -> AstNode:
        expr = self.parse_primary()
        while True:
            if self.at("."):
                dot = self.leaf()
                if self.at("<"):
                    raise self.unsupported("generic_method_invocation")
                if self.at("new"):
                    raise self.unsupported("inner_class_creation")
                if self.at("class"):
                    expr = _node("class_literal", [expr, dot, self.leaf()])
                    continue
                if self.at("this"):
                    expr = _node("field_access", [expr, dot, self.leaf("this")])
                    continue
                name = self.expect_identifier()
                if self.at("("):
                    expr = _node("method_invocation", [expr, dot, name, self.parse_argument_list()])
                else:
                    expr = _node("field_access", [expr, dot, name])
            elif self.at("["):
                expr = _node("array_access", [expr, self.leaf(), self.parse_expression(), self.expect("]")])
            elif self.at("++", "--"):
                expr = _node("update_expression", [expr, self.leaf()])
            elif self.at("::"):
                raise self.unsupported("method_reference")
            else:
                return expr

    def parse_primary(self) -> AstNode:
        t = self.tok
        if t is None:
            raise self.error("expected expression")
        if t.kind in LITERAL_TYPES:
            return self.leaf(LITERAL_TYPES[t.kind])
        if t.kind == "keyword":
            if t.text in ("true", "false"):
                return self.leaf("boolean_literal")
            if t.text == "null":
                return self.leaf("null_literal")
            if t.text in ("this", "super"):
                node = self.leaf(t.text)
                if self.at("("):
                    raise self.unsupported("explicit_constructor_invocation")
                return node
            if t.text == "new":
                return self.parse_creation()
            if t.text in PRIMITIVE_TYPES or t.text == "void":
                base = self.parse_type()
                if self.at(".") and self.peek() is not None and self.peek().text == "class":
                    return _node("class_literal", [base, self.leaf(), self.leaf()])
                raise self.error("expected expression")
            if t.text == "switch":
                raise self.unsupported("switch_expression")
            raise self.error("expected expression")
        if t.kind == "identifier":
            name = self.leaf("identifier")
            if self.at("("):
                return _node("method_invocation", [name, self.parse_argument_list()])
            return name
        if self.at("("):
            return _node("parenthesized_expression", [self.leaf(), self.parse_expression(), self.expect(")")])
        if self.at("@"):
            raise self.unsupported("annotation")
        raise self.error("expected expression")

    def parse_argument_list(self) -> AstNode:
        children = [self.expect("(")]
        if not self.at(")"):
            children.extend(self.parse_expression_list())
        children.append(self.expect(")"))
        return _node("argument_list", children)

    def parse_creation(self) -> AstNode:
        new = self.leaf()
        base = self.parse_type(allow_array=False)
        if self.at("["):
            dims: List[AstNode] = []
            while self.at("["):
                if self.peek() is not None and self.peek().text == "]":
                    dims.append(self.parse_dimensions())
                    break
                dims.append(_node("dimensions_expr", [self.leaf(), self.parse_expression(), self.expect("]")]))
            children = [new, base] + dims
            if self.at("{"):
                children.append(self.parse_array_initializer())
            return _node("array_creation_expression", children)
        args = self.parse_argument_list()
        if self.at("{"):
            raise self.unsupported("anonymous_class")
        return _node("object_creation_expression", [new, base, args])


# -----------------------------------------------------------------------------------------

def _leaf_type(t: Token) -> str:
    if t.kind == "identifier":
        return "identifier"
    if t.kind in LITERAL_TYPES:
        return LITERAL_TYPES[t.kind]
    return t.text


def _node(node_type: str, children: List[AstNode]) -> AstNode:
    span = (children[0].span[0], children[-1].span[1]) if children else (0, 0)
    return AstNode(-1, node_type, "", children, span)


def _renumber(root: AstNode) -> None:
    for i, node in enumerate(root.walk()):
        node.id = i


def parse_method(source: str) -> AstNode:
    """Parse a single Java method declaration into a typed AST (ids in pre-order)."""
    return JavaMethodParser(source).parse()
