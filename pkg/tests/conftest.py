from importlib import resources

import pytest

from pll.dsl import parse_grammar_doc
from pll.grammar import UNDEFINED, Grammar, ParamFn, Rule, identity_fn, nt, projection_fn, term
from pll.lexsel import lexer_literal, lexer_table, selector_all

ACCEPTANCE_LINES = []

COUNT_DOC = """\
domain 0..8
start S 0
selector all
terminal a = char 'a' out a+1
rule S -> { out = a }
rule S -> a S { in1 = a ; in2 = b1 ; out = b2 }
"""


def bundled(name):
    return resources.files("pll").joinpath("grammars", name).read_text(encoding="utf-8")


def bundled_names():
    return sorted(p.name for p in resources.files("pll").joinpath("grammars").iterdir() if p.name.endswith(".pll"))


@pytest.fixture
def count():
    return parse_grammar_doc(COUNT_DOC)


@pytest.fixture
def count01():
    return parse_grammar_doc(COUNT_DOC.replace("0..8", "0..1"))


def make_count(domain=range(9)):
    """COUNT assembled by hand, without the DSL."""
    dom = frozenset(domain)
    S, a = nt("S"), term("a")
    r1 = Rule("r1", S, (), identity_fn())
    r2 = Rule("r2", S, ((a, identity_fn()), (S, projection_fn(3, 2))), projection_fn(5, 4))
    g = Grammar({S}, {a}, [r1, r2], S, 0, {"a"}, dom)
    succ = ParamFn(1, lambda x: x + 1 if x + 1 in dom else UNDEFINED, "succ")
    return g, lexer_table({a: lexer_literal("a", succ)}), selector_all()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
