import random

import pytest
from hypothesis import given, settings, strategies as st

from pll.dsl import build, compile_fn, format_doc, parse_doc, parse_grammar_doc, parse_class, FnDecl
from pll.errors import DslError
from pll.grammar import UNDEFINED
from pll.harness import FuzzBounds, random_doc
from pll.pella import recognize
from conftest import COUNT_DOC, bundled, bundled_names


def diagnostics(text):
    with pytest.raises(DslError) as e:
        parse_grammar_doc(text)
    return [str(d) for d in e.value.diagnostics]


def test_count_document(count):
    g = count.grammar
    assert len(g.rules) == 2
    assert g.start.name == "S" and g.start_param == 0
    assert g.domain == frozenset(range(9))
    r2 = g.rule("r2")
    assert [f.arity for f in r2.fns] == [1, 3, 5]
    assert r2.fns[2](0, 0, 1, 1, 4) == 4


def test_scope_diagnostic():
    text = COUNT_DOC.replace("in2 = b1", "in2 = b2")
    [msg] = diagnostics(text)
    assert msg.startswith("6:")
    assert "variable b2 out of scope for in2 (f2)" in msg


def test_empty_document():
    assert diagnostics("") == ["1:1: missing start declaration"]


def test_collects_several_diagnostics():
    text = "domain 0..2\nstart S 5\nterminal t = char 'x' out a\nrule S -> t Q { in1 = a ; in2 = a ; out = a }\nbogus\n"
    msgs = diagnostics(text)
    assert any("unknown declaration 'bogus'" in m for m in msgs)
    assert any("unknown symbol Q" in m for m in msgs)
    assert any("start parameter 5 outside domain" in m for m in msgs)


@pytest.mark.parametrize("text, fragment", [
    ("start S 0\nrule S -> { }", "expected"),
    ("start S 0\nrule S -> x { in1 = a ; out = a }\nterminal x = char 'x' out a", None),
    ("start S 0\nrule S -> { in1 = a ; out = a }", "in1 but the rule has only 0 symbols"),
    ("start S 0\nrule S -> { out = a ; out = a }", "out assigned twice"),
    ("start S 0\nselector priority\nrule S -> { out = a }", "at least one terminal"),
    ("start S 0\nselector priority z\nrule S -> { out = a }", "unknown terminal z"),
    ("domain 3..1\nstart S 0\nrule S -> { out = a }", "empty domain"),
    ("start S 0\nterminal t = span [a] sideways out a\nrule S -> t { in1 = a ; out = a }", "greedy or all"),
    ("start S 0\nterminal t = char 'x' out len\nrule S -> t { in1 = a ; out = a }", "out of scope for terminal t"),
    ("start T 0\nrule S -> { out = a }", "unknown start symbol T"),
])
def test_rejections(text, fragment):
    if fragment is None:
        parse_grammar_doc(text)
        return
    assert any(fragment in m for m in diagnostics(text))


def test_guards_and_domain_make_functions_partial():
    loaded = parse_grammar_doc(bundled("bounded.pll"))
    f2 = loaded.grammar.rule("r2").fns[1]
    assert f2(0, 1, 2) == 2
    assert f2(0, 1, 3) is UNDEFINED
    out = compile_fn(parse_doc("start S 0\nrule S -> { out = a + 5 }").rules[0].fns[0], ["a"], (0, 3))
    assert out(0) is UNDEFINED


def test_expression_semantics():
    doc = parse_doc("start S 0\nrule S -> { out = max(a * 2 - 1, -a) + min(3, a) when not a == 1 and a >= 0 }")
    f = compile_fn(doc.rules[0].fns[0], ["a"], None)
    assert f(0) == 0 and f(2) == 5 and f(1) is UNDEFINED and f(-4) is UNDEFINED


def test_character_classes():
    cls = parse_class("[a-c_]")
    assert all(c in cls for c in "abc_") and "d" not in cls
    neg = parse_class(r"[^\]x]")
    assert "]" not in neg and "x" not in neg and "y" in neg


def test_bundled_grammars_load():
    names = bundled_names()
    assert "count.pll" in names and len(names) >= 5
    for name in names:
        loaded = parse_grammar_doc(bundled(name))
        assert loaded.domain is not None


def test_bundled_examples_behave():
    layout = parse_grammar_doc(bundled("layout.pll"))
    g = layout.grammar
    assert recognize(g, layout.lexer, layout.selector, "x\n x\nx\n") == [2]
    assert recognize(g, layout.lexer, layout.selector, "x\n  x\n") == []
    kw = parse_grammar_doc(bundled("keywords.pll"))
    assert recognize(kw.grammar, kw.lexer, kw.selector, "if x if") == [2]
    # the keyword wins at position 0, so the longer identifier is never tried
    assert recognize(kw.grammar, kw.lexer, kw.selector, "iffy") == []
    assert recognize(kw.grammar, kw.lexer, kw.selector, "fifi") == [0]


def test_format_is_a_fixpoint_on_bundled_documents():
    for name in bundled_names():
        once = format_doc(parse_doc(bundled(name)))
        assert format_doc(parse_doc(once)) == once


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 100_000))
def test_format_round_trips_random_documents(seed):
    doc = random_doc(random.Random(seed), FuzzBounds(alphabet="ab \n"))
    text = format_doc(doc)
    again = parse_doc(text)
    assert format_doc(again) == text
    build(again)


def test_format_preserves_operator_grouping():
    text = "start S 0\nrule S -> { out = a - (a - 1) * 2 when not (a < 1 or a > 3) }\n"
    doc = parse_doc(text)
    f = compile_fn(doc.rules[0].fns[0], ["a"], None)
    g = compile_fn(parse_doc(format_doc(doc)).rules[0].fns[0], ["a"], None)
    assert [f(x) for x in range(-1, 6)] == [g(x) for x in range(-1, 6)]
    assert isinstance(doc.rules[0].fns[0], FnDecl)
