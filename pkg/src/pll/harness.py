"""Differential testing of the parameterized engine against the induced-grammar
oracle, and a seeded generator of random grammars to feed it."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from .dsl import (BinOp, Call, Cmp, FnDecl, GrammarDoc, Loaded, Num, RuleDecl, TerminalDecl, Var, build,
                  format_doc, rule_scope)
from .ella import ella_outputs, ella_run
from .grammar import sorted_params
from .induced import Correspondence, InducedGrammar, induce_grammar, induce_lexer, induce_selector, lift
from .pella import EngineLimits, pella_outputs, pella_run


def strings_upto(alphabet: str, max_len: int) -> Iterator[str]:
    """Every string over ``alphabet`` of length <= max_len, shortest first."""
    for n in range(max_len + 1):
        for chars in itertools.product(alphabet, repeat=n):
            yield "".join(chars)


@dataclass
class CaseResult:
    text: str
    pella: list
    oracle: list
    problems: list = field(default_factory=list)
    checkpoints: int = 0
    induced_items: int = 0
    pi_checked: int = 0
    token_checks: int = 0

    @property
    def ok(self) -> bool:
        return not self.problems and self.pella == self.oracle


class Oracle:
    """The induced grammar, lexer and selector of a loaded document."""

    def __init__(self, loaded: Loaded):
        if loaded.domain is None:
            raise ValueError("the oracle needs a finite domain declaration")
        self.loaded = loaded
        self.grammar: InducedGrammar = induce_grammar(loaded.grammar)
        self.lexer = induce_lexer(loaded.lexer)
        self.selector = induce_selector(loaded.selector)


def check_case(loaded: Loaded, oracle: Oracle, text: str, *, deep: bool = False, verify: bool = False,
               runner: Callable = pella_run, limits: EngineLimits = EngineLimits()) -> CaseResult:
    """Run both engines on ``text``; with ``deep`` compare every checkpoint."""
    g = loaded.grammar
    p_trace, e_trace = [], []
    p_chart = runner(g, loaded.lexer, loaded.selector, text, limits, verify=verify,
                     trace=(lambda *cp: p_trace.append(cp)) if deep else None)
    e_chart = ella_run(oracle.grammar, oracle.lexer, oracle.selector, text, limits,
                       trace=(lambda *cp: e_trace.append(cp)) if deep else None)
    res = CaseResult(text, sorted_params(pella_outputs(p_chart, g)),
                     sorted_params(ella_outputs(e_chart, oracle.grammar)))
    res.pi_checked = p_chart.stats.get("pi_checked", 0)
    res.token_checks = p_chart.stats.get("token_checks", 0)
    if res.pella != res.oracle:
        res.problems.append(f"outputs differ: engine {res.pella} vs oracle {res.oracle}")
    if not deep:
        return res
    corr = Correspondence(loaded.domain)
    if [cp[:2] for cp in p_trace] != [cp[:2] for cp in e_trace]:
        res.problems.append(f"checkpoint schedules differ: {[cp[:2] for cp in p_trace]} vs "
                            f"{[cp[:2] for cp in e_trace]}")
    for (k, u, J, T), (_, _, J2, T2) in zip(p_trace, e_trace):
        res.checkpoints += 1
        ok, only_p, only_e = corr.check(J, J2)
        if not ok:
            res.problems.append(f"items differ at k={k}, u={u}: {len(only_p)} engine-only, "
                                f"{len(only_e)} oracle-only, e.g. {sorted(only_p | only_e, key=repr)[:3]}")
        if lift(T) != T2:
            res.problems.append(f"tokens differ at k={k}, u={u}")
    ok, only_p, only_e = corr.check(p_chart.items, e_chart.items)
    if not ok:
        res.problems.append(f"final charts do not correspond ({len(only_p)} / {len(only_e)} one-sided items)")
    for x in p_chart.items:
        res.induced_items += 1
        if not corr.induce([x]):
            res.problems.append(f"item {x!r} induces no ordinary item")
    return res


@dataclass
class DiffReport:
    cases: int = 0
    failure: Optional[CaseResult] = None
    checkpoints: int = 0
    induced_items: int = 0
    pi_checked: int = 0
    token_checks: int = 0

    @property
    def ok(self) -> bool:
        return self.failure is None

    def summary(self) -> str:
        if self.ok:
            return f"OK ({self.cases} cases)"
        f = self.failure
        lines = [f"MISMATCH on {f.text!r}: engine {f.pella} vs oracle {f.oracle}"]
        lines += ["  " + p for p in f.problems]
        return "\n".join(lines)


def diff_grammar(loaded: Loaded, max_len: int, alphabet: str, *, deep: bool = False, verify: bool = False,
                 runner: Callable = pella_run, oracle: Optional[Oracle] = None) -> DiffReport:
    """Compare on every string up to ``max_len``; stops at the first (shortest) mismatch."""
    oracle = oracle or Oracle(loaded)
    rep = DiffReport()
    for text in strings_upto(alphabet, max_len):
        res = check_case(loaded, oracle, text, deep=deep, verify=verify, runner=runner)
        rep.cases += 1
        rep.checkpoints += res.checkpoints
        rep.induced_items += res.induced_items
        rep.pi_checked += res.pi_checked
        rep.token_checks += res.token_checks
        if not res.ok:
            rep.failure = res
            break
    return rep


# -- random grammars -------------------------------------------------------

@dataclass(frozen=True)
class FuzzBounds:
    max_nonterminals: int = 4
    max_terminals: int = 3
    max_rules: int = 6
    max_rhs: int = 3
    max_domain: int = 4
    alphabet: str = "ab"


_NT_NAMES = ("S", "A", "B", "C", "E", "F", "G", "H")
_T_NAMES = ("x", "y", "z", "u", "v", "w")


def _affine(rng: random.Random, names: list):
    v = Var(rng.choice(names))
    roll = rng.random()
    if roll < 0.6:
        return v
    if roll < 0.75:
        return BinOp(rng.choice("+-"), v, Num(1))
    if roll < 0.8:
        return Num(rng.randrange(3))
    if roll < 0.9:
        return Call(rng.choice(("min", "max")), (v, Num(rng.randrange(3))))
    return BinOp("+", v, Var(rng.choice(names)))


def _fn(rng: random.Random, names: list) -> FnDecl:
    guard = None
    if rng.random() < 0.15:
        guard = Cmp(rng.choice(("<", "<=", "!=", ">")), Var(rng.choice(names)), Num(rng.randrange(3)))
    if rng.random() < 0.5:
        # thread the most recent parameter through unchanged
        return FnDecl(Var(names[-1] if names[-1] != "len" else "a"), guard)
    return FnDecl(_affine(rng, names), guard)


_CLASS_ESCAPES = {"\n": "\\n", "\t": "\\t", "]": "\\]", "\\": "\\\\", "^": "\\^", "-": "\\-"}


def _char_class(rng: random.Random, alphabet: str) -> str:
    chars = sorted(rng.sample(alphabet, rng.randint(1, len(alphabet))))
    return "[" + "".join(_CLASS_ESCAPES.get(c, c) for c in chars) + "]"


def random_doc(rng: random.Random, bounds: FuzzBounds = FuzzBounds()) -> GrammarDoc:
    """A random well-formed document within ``bounds``."""
    size = rng.randint(1, bounds.max_domain)
    nts = list(_NT_NAMES[:rng.randint(1, bounds.max_nonterminals)])
    ts = list(_T_NAMES[:rng.randint(1, bounds.max_terminals)])
    alphabet = bounds.alphabet
    doc = GrammarDoc(domain=(0, size - 1), start=("S", rng.randrange(size)))
    for name in ts:
        roll = rng.random()
        if roll < 0.45:
            t = TerminalDecl(name, "char", text=alphabet[len(doc.terminals) % len(alphabet)])
        elif roll < 0.65:
            n = rng.choice((0, 2))
            t = TerminalDecl(name, "literal", text="".join(rng.choice(alphabet) for _ in range(n)))
        elif roll < 0.85:
            t = TerminalDecl(name, "span", cls=_char_class(rng, alphabet), mode=rng.choice(("greedy", "all")))
        else:
            t = TerminalDecl(name, "count", cls=_char_class(rng, alphabet), count=_fn(rng, ["a"]))
        t.out = _fn(rng, ["a", "len"] if t.kind in ("span", "count") else ["a"])
        doc.terminals.append(t)
    n_rules = rng.randint(len(nts), max(len(nts), bounds.max_rules))
    lhss = nts + [rng.choice(nts) for _ in range(n_rules - len(nts))]
    # half the grammars get an iterating start symbol, S -> X S | <empty>
    iterate = len(lhss) < bounds.max_rules and bounds.max_rhs >= 2 and rng.random() < 0.5
    if iterate:
        lhss.append("S")
    for n_rule, lhs in enumerate(lhss):
        if iterate and n_rule == 0:
            rhs = [rng.choice(nts + ts), "S"]
        elif iterate and n_rule == len(lhss) - 1:
            rhs = []
        else:
            n = min(bounds.max_rhs, rng.choice((0, 1, 1, 2, 2, 3)))
            rhs = [rng.choice(nts + ts) for _ in range(n)]
        fns = [_fn(rng, rule_scope(i)) for i in range(1, len(rhs) + 2)]
        doc.rules.append(RuleDecl(lhs, rhs, fns))
    roll = rng.random()
    if roll < 0.5:
        doc.selector = ("all",)
    elif roll < 0.75:
        doc.selector = ("longest",)
    else:
        doc.selector = ("priority", *rng.sample(ts, len(ts)))
    return doc


@dataclass
class FuzzReport:
    seed: int
    grammars: int = 0
    cases: int = 0
    checkpoints: int = 0
    induced_items: int = 0
    pi_checked: int = 0
    token_checks: int = 0
    failure: Optional[tuple] = None  # (document text, DiffReport)

    @property
    def ok(self) -> bool:
        return self.failure is None

    def summary(self) -> str:
        if self.ok:
            return f"OK ({self.grammars} grammars, {self.cases} cases)"
        text, rep = self.failure
        return f"grammar #{self.grammars}:\n{text}{rep.summary()}"


def fuzz(seed: int, count: int, bounds: FuzzBounds = FuzzBounds(), *, max_len: int = 4,
         deep: bool = False, verify: bool = False, runner: Callable = pella_run) -> FuzzReport:
    """Generate ``count`` grammars from ``seed`` and diff each one."""
    rng = random.Random(seed)
    rep = FuzzReport(seed)
    for _ in range(count):
        doc = random_doc(rng, bounds)
        loaded = build(doc)
        d = diff_grammar(loaded, max_len, bounds.alphabet, deep=deep, verify=verify, runner=runner)
        rep.grammars += 1
        rep.cases += d.cases
        rep.checkpoints += d.checkpoints
        rep.induced_items += d.induced_items
        rep.pi_checked += d.pi_checked
        rep.token_checks += d.token_checks
        if not d.ok:
            rep.failure = (format_doc(doc), d)
            break
    return rep
