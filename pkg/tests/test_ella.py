from pll.ella import (ella_complete, ella_init, ella_outputs, ella_pi, ella_predict, ella_run, ella_scan,
                      ella_tokens, oracle_outputs)
from pll.grammar import Grammar, Rule, identity_fn, nt, term
from pll.induced import (EllaItem, InducedGrammar, InducedToken, Tagged, induce_grammar, induce_lexer,
                         induce_selector)
from conftest import make_count


def oracle(domain):
    g, lexer, sel = make_count(domain)
    return induce_grammar(g), induce_lexer(lexer), induce_selector(sel)


def test_init_has_one_item_per_top_rule():
    ig, *_ = oracle(range(2))
    init = ella_init(ig)
    assert len(init) == 2 and all(y.dot == 0 and y.i == y.j == 0 for y in init)
    ig1, *_ = oracle(range(1))
    assert len(ella_init(ig1)) == 1
    empty = InducedGrammar([], nt("S"), 0, {0})
    assert ella_init(empty) == frozenset()


def test_predict_adds_every_start_alternative():
    ig, *_ = oracle(range(2))
    S = nt("S")
    got = ella_predict(ig, 0, ella_init(ig)) - ella_init(ig)
    expected = {EllaItem(q, 0, 0, 0) for q in ig.rules if isinstance(q.lhs, Tagged)
                and q.lhs.base == S and q.lhs.alpha == 0}
    assert got == expected
    assert ella_predict(ig, 0, set()) == frozenset()


def test_closure_operators_are_idempotent_on_closed_sets():
    ig, *_ = oracle(range(2))
    J = ella_pi(ig, set(), 0, ella_init(ig))
    assert ella_predict(ig, 0, J) == J
    assert ella_complete(ig, 0, J) == J
    assert ella_scan(ig, set(), 0, J) == J
    assert ella_complete(ig, 0, set()) == frozenset()
    assert ella_scan(ig, set(), 0, set()) == frozenset()


def test_tokens():
    ig, il, isel = oracle(range(2))
    J = ella_pi(ig, set(), 0, ella_init(ig))
    want = {InducedToken(Tagged(term("a"), 0, 1), "a")}
    assert ella_tokens(il, isel, "aa", set(), 0, J) == want
    assert ella_tokens(il, isel, "aa", set(), 0, ella_init(ig)) == frozenset()
    assert ella_tokens(il, isel, "aa", want, 0, J) == want


def test_run():
    ig, il, isel = oracle(range(4))
    chart = ella_run(ig, il, isel, "aaa")
    S = nt("S")
    assert any(y.complete and y.i == 0 and y.rule.lhs == Tagged(S, 0, 3) for y in chart.bins[3])
    empty = ella_run(ig, il, isel, "")
    assert any(y.complete and y.rule.lhs == Tagged(S, 0, 0) and not y.rule.rhs for y in empty.bins[0])
    bad = ella_run(ig, il, isel, "ab")
    assert not any(y.complete and y.i == 0 for y in bad.bins[2])


def test_outputs():
    ig, il, isel = oracle(range(9))
    assert ella_outputs(ella_run(ig, il, isel, "aaa"), ig) == {3}
    assert ella_outputs(ella_run(ig, il, isel, ""), ig) == {0}
    assert ella_outputs(ella_run(ig, il, isel, "ab"), ig) == frozenset()
    assert oracle_outputs(ig, il, isel, "a" * 8) == [8]


def test_oracle_has_no_parameter_machinery():
    # a domain-{0} epsilon grammar runs as a two-rule CFG
    S = nt("S")
    g = Grammar({S}, set(), [Rule("r1", S, (), identity_fn())], S, 0, domain={0})
    ig = induce_grammar(g)
    chart = ella_run(ig, induce_lexer(make_count()[1]), induce_selector(make_count()[2]), "")
    assert len(chart.items) == 3
