import random

import pll.pella as pella
from pll.dsl import parse_doc
from pll.harness import FuzzBounds, Oracle, check_case, diff_grammar, fuzz, random_doc, strings_upto
from conftest import COUNT_DOC


def literal_run(*args, **kw):
    return pella.pella_run(*args, literal=True, **kw)


def test_strings_upto():
    assert list(strings_upto("ab", 2)) == ["", "a", "b", "aa", "ab", "ba", "bb"]
    assert len(list(strings_upto("ab", 4))) == 31
    assert list(strings_upto("ab", 0)) == [""]


def test_deep_case_on_count(count):
    res = check_case(count, Oracle(count), "aa", deep=True, verify=True)
    assert res.ok and res.pella == res.oracle == [2]
    assert res.checkpoints > 0 and res.induced_items > 0 and res.pi_checked > 0


def test_diff_count(count):
    rep = diff_grammar(count, 3, "ab", deep=True)
    assert rep.ok and rep.summary() == "OK (15 cases)"


def test_literal_runner_agrees(count):
    assert diff_grammar(count, 3, "ab", deep=True, runner=literal_run).ok


def test_oracle_needs_a_domain():
    import pytest
    from pll.dsl import build
    doc = parse_doc(COUNT_DOC.replace("domain 0..8\n", ""))
    with pytest.raises(ValueError):
        Oracle(build(doc))


def skip_scan(g, T, k, I):
    return frozenset(I)


def test_mutant_is_caught_on_the_shortest_string(count, monkeypatch):
    monkeypatch.setattr(pella, "pella_scan", skip_scan)
    rep = diff_grammar(count, 3, "ab", runner=literal_run)
    assert not rep.ok
    assert rep.failure.text == "a" and rep.cases == 2
    assert rep.summary().startswith("MISMATCH on 'a': engine [] vs oracle [1]")


def test_mutant_is_caught_by_fuzzing(monkeypatch):
    monkeypatch.setattr(pella, "pella_scan", skip_scan)
    rep = fuzz(0, 50, runner=literal_run)
    assert not rep.ok
    assert "MISMATCH" in rep.summary() and "rule S ->" in rep.summary()


def test_fuzz_is_deterministic():
    a, b = fuzz(5, 8, deep=True), fuzz(5, 8, deep=True)
    assert a.ok and a == b
    assert fuzz(5, 0).summary() == "OK (0 grammars, 0 cases)"


def test_random_documents_respect_bounds():
    bounds = FuzzBounds(max_nonterminals=2, max_terminals=1, max_rules=3, max_rhs=2, max_domain=2)
    rng = random.Random(11)
    for _ in range(200):
        doc = random_doc(rng, bounds)
        assert len({r.lhs for r in doc.rules}) <= 2
        assert len(doc.terminals) <= 1
        assert len(doc.rules) <= 3
        assert all(len(r.rhs) <= 2 for r in doc.rules)
        assert doc.domain[1] - doc.domain[0] + 1 <= 2
