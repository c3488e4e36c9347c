import random

import pytest
from hypothesis import given, strategies as st

from pll.errors import InternalInvariantError, LexerContractError, SelectorContractError
from pll.grammar import UNDEFINED, ParamFn, identity_fn, term
from pll.lexsel import (CharClass, LexerFn, SelectorFn, Token, check_token, lex, lexer_charspan, lexer_count,
                        lexer_literal, select, selector_all, selector_longest, selector_priority)
from conftest import make_count

a, b = term("a"), term("b")
plus_len = ParamFn(2, lambda x, n: x + n, "plus_len")


def test_count_lexer_consumes_one_a():
    _, lexer, _ = make_count()
    assert lex(lexer, a, 0, "aaa", 0) == {Token(a, 0, 1, "a")}


def test_character_mismatch():
    _, lexer, _ = make_count()
    assert lex(lexer, a, 0, "b", 0) == frozenset()


def test_no_room_at_end_of_input():
    _, lexer, _ = make_count()
    assert lex(lexer, a, 0, "aa", 2) == frozenset()
    span = lexer_charspan(CharClass.of("a"), "all", plus_len)
    assert lex(span, a, 0, "aa", 2) == frozenset()


def test_undefined_output_yields_no_token():
    _, lexer, _ = make_count(range(2))
    assert lex(lexer, a, 1, "a", 0) == frozenset()


def test_lexer_contract_violations():
    liar = LexerFn(lambda t, al, D, k: [Token(t, al, 0, "x")])
    with pytest.raises(LexerContractError) as e:
        lex(liar, a, 0, "ab", 0)
    assert e.value.token == Token(a, 0, 0, "x")
    overrun = LexerFn(lambda t, al, D, k: [Token(t, al, 0, D[k:] + "a")])
    with pytest.raises(LexerContractError):
        lex(overrun, a, 0, "a", 0)
    wrong_echo = LexerFn(lambda t, al, D, k: [Token(b, al, 0, "")])
    with pytest.raises(LexerContractError):
        lex(wrong_echo, a, 0, "", 0)
    wrong_alpha = LexerFn(lambda t, al, D, k: [Token(t, al + 1, 0, "")])
    with pytest.raises(LexerContractError):
        lex(wrong_alpha, a, 0, "", 0)


def test_lex_rejects_bad_queries():
    _, lexer, _ = make_count()
    with pytest.raises(ValueError):
        lex(lexer, a, 0, "a", 2)


def test_empty_literal_is_an_empty_token():
    l = lexer_literal("", identity_fn())
    assert lex(l, a, 3, "xy", 2) == {Token(a, 3, 3, "")}


def test_span_modes():
    greedy = lexer_charspan(CharClass([("a", "b")]), "greedy", plus_len)
    assert lex(greedy, a, 0, "abac", 0) == {Token(a, 0, 3, "aba")}
    every = lexer_charspan(CharClass([("a", "b")]), "all", plus_len)
    assert lex(every, a, 0, "abac", 0) == {Token(a, 0, n, "aba"[:n]) for n in (1, 2, 3)}
    assert lex(every, a, 0, "c", 0) == frozenset()


def test_count_lexer():
    l = lexer_count(CharClass.of(" "), identity_fn(), plus_len)
    assert lex(l, a, 2, "  x", 0) == {Token(a, 2, 4, "  ")}
    assert lex(l, a, 3, "  x", 0) == frozenset()
    assert lex(l, a, 0, "  x", 0) == {Token(a, 0, 0, "")}
    neg = lexer_count(CharClass.of(" "), ParamFn(1, lambda x: -1), plus_len)
    assert lex(neg, a, 0, " ", 0) == frozenset()
    undef = lexer_count(CharClass.of(" "), ParamFn(1, lambda x: UNDEFINED), plus_len)
    assert lex(undef, a, 0, " ", 0) == frozenset()


def test_negated_class():
    cls = CharClass([("a", "c")], negated=True)
    assert "d" in cls and "b" not in cls


x, y = Token(a, 0, 0, "a"), Token(b, 0, 0, "bb")


def test_selector_all_is_maximal():
    assert select(selector_all(), set(), {x, y}) == {x, y}


def test_selector_longest():
    one, two = Token(a, 0, 1, "a"), Token(a, 0, 2, "aa")
    assert select(selector_longest(), set(), {one, two}) == {two}
    assert select(selector_longest(), {one}, {one, two}) == {one, two}


def test_selector_priority():
    sel = selector_priority([b, a])
    assert select(sel, set(), {x, y}) == {y}
    assert select(sel, {x}, {x, y}) == {x, y}


def test_forced_selection():
    for sel in (selector_all(), selector_longest(), selector_priority([a])):
        assert select(sel, {x}, {x}) == {x}
        assert select(sel, set(), set()) == frozenset()


def test_selector_contract_violations():
    with pytest.raises(SelectorContractError):
        select(SelectorFn(lambda A, B: set()), {x}, {x, y})
    with pytest.raises(SelectorContractError):
        select(SelectorFn(lambda A, B: B | {Token(a, 9, 9, "")}), set(), {x})
    with pytest.raises(InternalInvariantError):
        select(selector_all(), {x}, {y})


# -- contract properties ---------------------------------------------------

ALPHABET = "ab "
CLASSES = [CharClass.of("a"), CharClass.of("ab"), CharClass([("a", "b")], negated=True), CharClass.of(" ")]


def random_builtin_lexer(rng):
    cls = rng.choice(CLASSES)
    out2 = ParamFn(2, lambda al, n, c=rng.randrange(3): al + n - c if al + n - c >= 0 else UNDEFINED)
    kind = rng.randrange(4)
    if kind == 0:
        text = "".join(rng.choice(ALPHABET) for _ in range(rng.randrange(3)))
        return lexer_literal(text, ParamFn(1, lambda al, c=rng.randrange(2): al + c))
    if kind == 1:
        return lexer_charspan(cls, rng.choice(("greedy", "all")), out2)
    if kind == 2:
        return lexer_charspan(cls, "all", out2, min_len=0)
    return lexer_count(cls, ParamFn(1, lambda al, c=rng.randrange(-1, 3): al + c), out2)


def random_token_sets(rng, n=6):
    pool = [Token(rng.choice((a, b)), rng.randrange(2), rng.randrange(3),
                  rng.choice(ALPHABET) * rng.randrange(3)) for _ in range(n)]
    B = {t for t in pool if rng.random() < 0.7}
    A = {t for t in B if rng.random() < 0.4}
    return A, B


def run_lexer_contracts(seed, calls):
    rng = random.Random(seed)
    for _ in range(calls):
        l = random_builtin_lexer(rng)
        D = "".join(rng.choice(ALPHABET) for _ in range(rng.randrange(6)))
        k = rng.randrange(len(D) + 1)
        alpha = rng.randrange(4)
        raw = list(l.evaluator(a, alpha, D, k))
        for tok in raw:
            check_token(tok, a, alpha, D, k)


def run_selector_contracts(seed, calls):
    rng = random.Random(seed)
    selectors = [selector_all(), selector_longest(), selector_priority([a]), selector_priority([b, a])]
    for _ in range(calls):
        A, B = random_token_sets(rng)
        sel = rng.choice(selectors)
        R = frozenset(sel.evaluator(frozenset(A), frozenset(B)))
        assert A <= R <= B
        if sel.name == "all":
            assert R == B


def test_builtin_lexers_respect_match_condition():
    run_lexer_contracts(seed=7, calls=2000)


def test_builtin_selectors_respect_inclusions():
    run_selector_contracts(seed=7, calls=2000)


@given(st.text(alphabet="ab ", max_size=6), st.data())
def test_span_all_lengths_property(D, data):
    k = data.draw(st.integers(0, len(D)))
    l = lexer_charspan(CharClass.of("a"), "all", plus_len)
    toks = lex(l, a, 0, D, k)
    run = len(D[k:]) - len(D[k:].lstrip("a"))
    assert {t.chars for t in toks} == {"a" * n for n in range(1, run + 1)}
