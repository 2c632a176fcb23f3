import pytest

from helpers import COLLECT_METHOD, MAX_METHOD
from hierarchynet.modules.syntax.astNode import tree_from_json, tree_to_json
from hierarchynet.modules.syntax.javaLexer import STR_TOKEN, tokenize
from hierarchynet.modules.syntax.javaParser import JavaMethodParser, grammar_vocabulary, parse_method
from hierarchynet.modules.syntax.subtokens import insert_subtoken_nodes, linearize, split_subtokens
from hierarchynet.utils.errors import (
    DataError, JavaSyntaxError, UnsupportedConstruct, UnterminatedString,
)


def leaf_tokens(tree):
    return [n.token for n in tree.walk() if n.is_leaf]


# ---------------------------------------------------------------------------------------
# lexer

def test_tokenize_kinds_and_texts():
    tokens = tokenize("int x = a+b; // trailing\n/* block */ return 0x1F;")
    assert [t.text for t in tokens] == ["int", "x", "=", "a", "+", "b", ";", "return", "0x1F", ";"]
    assert [t.kind for t in tokens[:4]] == ["keyword", "identifier", "op", "identifier"]
    assert tokens[8].kind == "integer"


def test_tokenize_maximal_munch():
    assert [t.text for t in tokenize("x >>>= 2; y != z")] == ["x", ">>>=", "2", ";", "y", "!=", "z"]


def test_string_literal_becomes_placeholder():
    tokens = tokenize('s = "hello \\" world";')
    assert [t.text for t in tokens] == ["s", "=", STR_TOKEN, ";"]
    assert tokens[2].kind == "string"


def test_unterminated_string():
    with pytest.raises(UnterminatedString):
        tokenize('s = "never closed;\n')


def test_unterminated_comment():
    with pytest.raises(JavaSyntaxError):
        tokenize("int x; /* open")


# ---------------------------------------------------------------------------------------
# parser

@pytest.mark.parametrize("source", [
    MAX_METHOD,
    COLLECT_METHOD,
    "void f() { do { x--; } while (x > 0); }",
    "int g(int k) { switch (k) { case 1: return 2; default: break; } return 0; }",
    "void h() { try { run(); } catch (IOException | RuntimeException e) { log(e); } finally { close(); } }",
    "String s(Object o) { return o instanceof String ? (String) o : <str>; }",
    "int[] mk(int n) { int[] out = new int[n]; out[0] = n > 1 ? 1 : 0; return out; }",
])
def test_leaves_reproduce_token_stream(source):
    tree = parse_method(source)
    assert tree.node_type == "method_declaration"
    assert leaf_tokens(tree) == [t.text for t in tokenize(source)]


def test_node_ids_are_preorder():
    tree = parse_method(MAX_METHOD)
    assert [n.id for n in tree.walk()] == list(range(tree.size()))


def test_tree_json_round_trip_keeps_structure():
    tree = parse_method(MAX_METHOD)
    back = tree_from_json(tree_to_json(tree))
    assert [(n.id, n.node_type, n.token) for n in back.walk()] == \
           [(n.id, n.node_type, n.token) for n in tree.walk()]


def test_grammar_vocabulary_covers_parsed_types():
    vocab = set(grammar_vocabulary())
    tree = insert_subtoken_nodes(parse_method(COLLECT_METHOD))
    assert {n.node_type for n in tree.walk()} <= vocab


@pytest.mark.parametrize("source,construct", [
    ("void f() { Runnable r = () -> run(); }", "lambda_expression"),
    ("void f(List<String> xs) { for (String x : xs) { use(x); } }", "enhanced_for_statement"),
    ("void f() { assert x > 0; }", "assert_statement"),
    ("void f() { outer: while (true) { break; } }", "labeled_statement"),
    ("void f() { synchronized (lock) { run(); } }", "synchronized_statement"),
    ("void f() { call(Foo::bar); }", "method_reference"),
    ("<T> void f(T t) { }", "type_parameters"),
    ("void f() { use(@Foo); }", "annotation"),
])
def test_unsupported_constructs(source, construct):
    with pytest.raises(UnsupportedConstruct) as info:
        parse_method(source)
    assert construct in str(info.value)
    assert info.value.exit_code == 2


@pytest.mark.parametrize("source", [
    "int f( { return 1; }",
    "int f() { return 1 }",
    "int f() { return 1; } extra",
    "int f();",
])
def test_syntax_errors(source):
    with pytest.raises(DataError):
        parse_method(source)


# ---------------------------------------------------------------------------------------
# sub-tokens and linearization

@pytest.mark.parametrize("token,pieces", [
    ("getMaxValue", ["get", "max", "value"]),
    ("parseHTTPResponse", ["parse", "http", "response"]),
    ("HTTPServer", ["http", "server"]),
    ("max_value", ["max", "value"]),
    ("value2", ["value", "2"]),
    ("num2str_v2", ["num", "2", "str", "v", "2"]),
    ("getItemCount", ["get", "item", "count"]),
    ("x", ["x"]),
    ("ABC", ["abc"]),
    ("+=", ["+="]),
    (STR_TOKEN, [STR_TOKEN]),
    ("0x1F", ["0x1f"]),
    ("42", ["42"]),
])
def test_split_subtokens(token, pieces):
    assert split_subtokens(token) == pieces


def test_subtoken_nodes_inserted_under_leaf():
    tree = insert_subtoken_nodes(parse_method("int getSize() { return itemCount; }"))
    split = [n for n in tree.walk() if n.children and all(c.node_type == "sub_token" for c in n.children)]
    assert [[c.token for c in n.children] for n in split] == [["get", "size"], ["item", "count"]]
    assert all(n.token == "" for n in split)


def test_subtoken_insertion_leaves_input_untouched():
    tree = parse_method("int getSize() { return itemCount; }")
    before = tree.size()
    insert_subtoken_nodes(tree)
    assert tree.size() == before


@pytest.mark.parametrize("source", [MAX_METHOD, COLLECT_METHOD])
def test_linearized_tokens_match_split_lexer_stream(source):
    linear = linearize(insert_subtoken_nodes(parse_method(source)))
    expected = [piece for t in tokenize(source) for piece in split_subtokens(t.text)]
    assert linear.token_stream() == expected
    assert len(linear) == len(linear.node_types) == len(linear.tokens)


@pytest.mark.parametrize("source", [MAX_METHOD, COLLECT_METHOD])
def test_subtoken_insertion_is_idempotent(source):
    once = insert_subtoken_nodes(parse_method(source))
    twice = insert_subtoken_nodes(once)
    assert tree_to_json(twice) == tree_to_json(once)


def test_restore_undoes_closing_angle_splits():
    source = "List<List<Integer>> ys = xs;"
    parser = JavaMethodParser(source)
    state = parser.save()
    parser.parse_type()
    assert [t.text for t in parser.tokens[:7]] == ["List", "<", "List", "<", "Integer", ">", ">"]
    parser.restore(state)
    assert parser.pos == 0
    assert [t.text for t in parser.tokens] == [t.text for t in tokenize(source)]


def test_nested_generics_next_to_shifts():
    tree = parse_method("int f(List<List<Integer>> xs) { List<List<Integer>> ys = xs; return n >> 1; }")
    leaves = [n.token for n in tree.walk() if n.is_leaf]
    assert leaves.count(">") == 4 and leaves.count(">>") == 1
    assert sum(n.node_type == "variable_declaration" for n in tree.walk()) == 1


def test_annotations_accepted_as_modifiers():
    tree = parse_method("int f(@NonNull String s) { @SuppressWarnings(\"x\") final int n = 1; return n; }")
    owners = [n.node_type for n in tree.walk() if any(c.node_type == "annotation" for c in n.children)]
    assert owners == ["modifiers", "modifiers"]
