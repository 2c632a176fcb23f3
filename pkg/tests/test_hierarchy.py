from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from hypothesis.strategies import composite

from helpers import MAX_METHOD
from hierarchynet.modules.buildHcr import build_hcr
from hierarchynet.modules.hierarchy.extractHierarchy import PLACEHOLDER, extract_hierarchy
from hierarchynet.modules.hierarchy.rules import OUTPUT_KINDS
from hierarchynet.modules.syntax.javaLexer import tokenize
from hierarchynet.modules.syntax.subtokens import split_subtokens

NAMES = ("a", "b", "c", "total", "itemCount")


# ---------------------------------------------------------------------------------------
# method generator

@composite
def expressions(draw, depth=0):
    atom = st.one_of(st.sampled_from(NAMES), st.integers(0, 99).map(str))
    if depth >= 2:
        return draw(atom)
    kind = draw(st.sampled_from(["atom", "binary", "call", "paren", "index", "unary"]))
    if kind == "atom":
        return draw(atom)
    if kind == "binary":
        op = draw(st.sampled_from(["+", "-", "*", "<", ">=", "==", "&&"]))
        return f"{draw(expressions(depth + 1))} {op} {draw(expressions(depth + 1))}"
    if kind == "call":
        args = draw(st.lists(expressions(depth + 1), max_size=2))
        return f"{draw(st.sampled_from(['foo', 'list.get', 'Math.max']))}({', '.join(args)})"
    if kind == "paren":
        return f"({draw(expressions(depth + 1))})"
    if kind == "index":
        return f"arr[{draw(expressions(depth + 1))}]"
    return f"!{draw(expressions(depth + 1))}"


@composite
def blocks(draw, depth):
    return "{ " + " ".join(draw(st.lists(statements(depth + 1), max_size=3))) + " }"


@composite
def statements(draw, depth=0):
    simple = ["decl", "assign", "compound", "update", "call"]
    compound = ["if", "ifelse", "while", "for", "do", "switch", "try"]
    kind = draw(st.sampled_from(simple + (compound if depth < 2 else [])))
    name = draw(st.sampled_from(NAMES))
    expr = draw(expressions())
    if kind == "decl":
        return f"int {name} = {expr};"
    if kind == "assign":
        return f"{name} = {expr};"
    if kind == "compound":
        return f"{name} += {expr};"
    if kind == "update":
        return f"{name}++;"
    if kind == "call":
        return f"foo({expr});"
    if kind == "if":
        return f"if ({expr}) {draw(blocks(depth))}"
    if kind == "ifelse":
        return f"if ({expr}) {draw(blocks(depth))} else {draw(blocks(depth))}"
    if kind == "while":
        return f"while ({expr}) {draw(blocks(depth))}"
    if kind == "for":
        return f"for (int i = 0; i < {expr}; i++) {draw(blocks(depth))}"
    if kind == "do":
        return f"do {draw(blocks(depth))} while ({expr});"
    if kind == "switch":
        return f"switch ({name}) {{ case 1: {name} = {expr}; break; default: foo({name}); }}"
    return f"try {draw(blocks(depth))} catch (Exception e) {{ log(e); }}"


@composite
def methods(draw):
    body = draw(st.lists(statements(), min_size=1, max_size=5))
    ret = draw(st.one_of(st.none(), expressions()))
    tail = f" return {ret};" if ret is not None else ""
    return "int compute(int a, int b) { " + " ".join(body) + tail + " }"


# ---------------------------------------------------------------------------------------
# invariants

def check_partition(bundle):
    all_ids = {n.id for n in bundle.tree.walk()}
    survivors = set(bundle.reduced.original_ids)
    seen = set(survivors)
    for sub in bundle.subtrees:
        assert not (seen & sub.node_ids), "node assigned twice"
        seen |= sub.node_ids
    assert seen == all_ids
    assert sum(len(s.node_ids) for s in bundle.subtrees) + len(survivors) == bundle.tree.size()


def check_placeholders(bundle):
    reduced = bundle.reduced
    placeholders = [n.id for n in reduced.root.walk() if n.node_type == PLACEHOLDER]
    assert sorted(placeholders) == sorted(reduced.subtree_of)
    assert sorted(reduced.subtree_of.values()) == list(range(len(bundle.subtrees)))
    for sub in bundle.subtrees:
        assert reduced.subtree_of[sub.placeholder_id] == sub.id
        assert sub.kind in OUTPUT_KINDS


def check_coarse_endpoints(bundle):
    for etype in ("CD", "DF", "NS"):
        for s, d in bundle.graph.edges_of(etype):
            assert bundle.reduced.is_placeholder(s) and bundle.reduced.is_placeholder(d), (etype, s, d)


def check_alignment(bundle):
    owner = bundle.alignment.owner
    assert len(owner) == bundle.k
    assert all(0 <= u < bundle.m for u in owner)
    assert bundle.m == len(bundle.graph.nodes)


def check_token_stream(bundle):
    expected = [piece for t in tokenize(bundle.source) for piece in split_subtokens(t.text)]
    assert bundle.linear.token_stream() == expected


@settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(methods())
def test_generated_methods_keep_hierarchy_invariants(source):
    bundle = build_hcr(source)
    check_partition(bundle)
    check_placeholders(bundle)
    check_coarse_endpoints(bundle)
    check_alignment(bundle)
    check_token_stream(bundle)


# ---------------------------------------------------------------------------------------
# the max method

def test_max_method_subtrees(max_bundle):
    texts = [(s.kind, s.text()) for s in max_bundle.subtrees]
    assert texts == [
        ("method_header", "public int max ( int a , int b )"),
        ("variable_declaration", "int max = a ;"),
        ("binary_expression", "a < b"),
        ("assignment_statement", "max = b ;"),
        ("return_statement", "return max ;"),
    ]


def test_max_method_reduced_tree_keeps_scaffolding(max_bundle):
    kept = {n.node_type for n in max_bundle.reduced.root.walk()}
    assert {"method_declaration", "block", "if_statement", "if", "(", ")", "{", "}"} <= kept
    assert "identifier" not in kept


def test_alignment_maps_tokens_to_their_unit(max_bundle):
    linear = max_bundle.linear
    units = max_bundle.alignment.units
    condition = next(s for s in max_bundle.subtrees if s.kind == "binary_expression")
    for pos, nid in enumerate(linear.nodes):
        unit = units[max_bundle.alignment.owner[pos]]
        if nid in condition.node_ids:
            assert unit.subtree_id == condition.id
        elif nid in max_bundle.reduced.original_ids:
            assert unit.node_id == nid


def test_extract_hierarchy_without_linear_order(max_bundle):
    reduced, subtrees, alignment = extract_hierarchy(max_bundle.tree)
    assert len(subtrees) == len(max_bundle.subtrees)
    assert len(alignment.owner) == max_bundle.tree.size()


def test_nested_expressions_stay_inside_their_statement():
    bundle = build_hcr("int f(int a) { int x = foo(a + 1) * 2; return x; }")
    assert [s.kind for s in bundle.subtrees] == ["method_header", "variable_declaration", "return_statement"]


def test_extraction_is_deterministic():
    first = build_hcr(MAX_METHOD).to_record()
    second = build_hcr(MAX_METHOD).to_record()
    assert first == second
