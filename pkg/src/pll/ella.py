"""Plain Earley-based local lexing over an induced grammar.

This is the reference the parameterized engine is checked against. It only
knows ordinary items ``(rule, dot, i, j)``; parameters live inside the
induced symbols. Speed is secondary to being obviously the classical
algorithm.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .errors import ResourceExhausted
from .grammar import sorted_params
from .induced import EllaItem, InducedGrammar, InducedLexer, InducedSelector, InducedToken, Tagged, norm
from .pella import EngineLimits


def ella_init(ig: InducedGrammar) -> frozenset:
    return frozenset(EllaItem(q, 0, 0, 0) for q in ig.top_rules())


def ella_predict(ig: InducedGrammar, k: int, I: Iterable[EllaItem]) -> frozenset:
    I = frozenset(I)
    new = set()
    for x in I:
        if x.j == k:
            M = x.next_symbol
            if M is not None and not M.is_terminal:
                new.update(EllaItem(q, 0, k, k) for q in ig.by_lhs.get(M, ()))
    return I | new


def ella_complete(ig: InducedGrammar, k: int, I: Iterable[EllaItem]) -> frozenset:
    I = frozenset(I)
    finished = [z for z in I if z.j == k and z.complete]
    new = set()
    for y in I:
        M = y.next_symbol
        if M is None or M.is_terminal:
            continue
        for z in finished:
            if z.rule.lhs == M and z.i == y.j:
                new.add(EllaItem(y.rule, y.dot + 1, y.i, k))
    return I | new


def ella_scan(ig: InducedGrammar, T: Iterable[InducedToken], k: int, I: Iterable[EllaItem]) -> frozenset:
    I = frozenset(I)
    T = tuple(T)
    new = set()
    for x in I:
        if x.j != k:
            continue
        X = x.next_symbol
        if X is None or not X.is_terminal:
            continue
        for tok in T:
            if tok.symbol == X:
                new.add(EllaItem(x.rule, x.dot + 1, x.i, k + len(tok.chars)))
    return I | new


def ella_tokens(lexer: InducedLexer, selector: InducedSelector, D: str,
                T: Iterable[InducedToken], k: int, I: Iterable[EllaItem]) -> frozenset:
    V = set()
    for x in I:
        if x.j == k:
            X = x.next_symbol
            if X is not None and X.is_terminal:
                V |= lexer(X, D, k)
    return selector(frozenset(T), frozenset(V))


def ella_pi(ig: InducedGrammar, T, k: int, I) -> frozenset:
    T = frozenset(T)
    cur = frozenset(I)
    while True:
        nxt = ella_scan(ig, T, k, ella_complete(ig, k, ella_predict(ig, k, cur)))
        if nxt == cur:
            return cur
        cur = nxt


@dataclass
class EllaChart:
    input: str
    bins: list
    tokens: list
    stats: dict = field(default_factory=dict)

    @property
    def items(self) -> frozenset:
        return frozenset().union(*self.bins)


class _EllaRun:
    def __init__(self, ig, lexer, selector, D, limits):
        self.ig = ig
        self.lexer = lexer
        self.selector = selector
        self.D = D
        self.n = len(D)
        self.limits = limits
        self.bins = [set() for _ in range(self.n + 1)]
        self.waiting = [{} for _ in range(self.n + 1)]  # symbol -> items
        self.done = [{} for _ in range(self.n + 1)]  # lhs -> completed items
        self.count = 0
        self.k = 0
        self.agenda = []
        self.lexed = {}

    def add(self, x: EllaItem) -> None:
        b = self.bins[x.j]
        if x in b:
            return
        self.count += 1
        if self.count > self.limits.max_items:
            raise ResourceExhausted(f"more than {self.limits.max_items} items at position {self.k}", self.k)
        b.add(x)
        if x.complete:
            self.done[x.j].setdefault(x.rule.lhs, []).append(x)
        else:
            self.waiting[x.j].setdefault(x.next_symbol, []).append(x)
        if x.j == self.k:
            self.agenda.append(x)

    def pi(self, T: frozenset) -> None:
        k = self.k
        by_symbol = {}
        for tok in T:
            by_symbol.setdefault(tok.symbol, []).append(tok)
        predicted = set()
        self.agenda = list(self.bins[k])
        while self.agenda:
            x = self.agenda.pop()
            if x.complete:
                for y in list(self.waiting[x.i].get(x.rule.lhs, ())):
                    self.add(EllaItem(y.rule, y.dot + 1, y.i, k))
                continue
            X = x.next_symbol
            if X.is_terminal:
                for tok in by_symbol.get(X, ()):
                    self.add(EllaItem(x.rule, x.dot + 1, x.i, k + len(tok.chars)))
                continue
            if X not in predicted:
                predicted.add(X)
                for q in self.ig.by_lhs.get(X, ()):
                    self.add(EllaItem(q, 0, k, k))
            for z in self.done[k].get(X, ()):
                if z.i == k:
                    self.add(EllaItem(x.rule, x.dot + 1, x.i, k))
                    break

    def tokens(self, T: frozenset) -> frozenset:
        k = self.k
        V = set()
        for X, xs in self.waiting[k].items():
            if xs and X.is_terminal:
                toks = self.lexed.get((X, k))
                if toks is None:
                    toks = self.lexed[(X, k)] = self.lexer(X, self.D, k)
                V |= toks
        return self.selector(T, frozenset(V))

    def snapshot(self) -> frozenset:
        return frozenset().union(*self.bins)


def ella_run(ig: InducedGrammar, lexer: InducedLexer, selector: InducedSelector, D: str,
             limits: EngineLimits = EngineLimits(), *,
             trace: Optional[Callable] = None) -> EllaChart:
    """Run the chart recurrences over the induced grammar."""
    run = _EllaRun(ig, lexer, selector, D, limits)
    for x in ella_init(ig):
        run.add(x)
    tokens_by_pos = []
    for k in range(run.n + 1):
        run.k = k
        run.pi(frozenset())
        T = frozenset()
        u = 0
        if trace:
            trace(k, u, run.snapshot(), T)
        while True:
            size = run.count
            T_next = run.tokens(T)
            run.pi(T_next)
            u += 1
            if u > limits.max_rounds:
                raise ResourceExhausted(f"token iteration did not stabilize at position {k}", k)
            if trace:
                trace(k, u, run.snapshot(), T_next)
            stable = T_next == T and run.count == size
            T = T_next
            if stable:
                break
        tokens_by_pos.append(T)
    return EllaChart(D, [frozenset(b) for b in run.bins], tokens_by_pos,
                     {"items": run.count, "positions": run.n + 1})


def ella_outputs(chart: EllaChart, ig: InducedGrammar) -> frozenset:
    n = len(chart.input)
    out = set()
    for y in norm(chart.bins[n]):
        lhs = y.rule.lhs
        if (y.complete and y.i == 0 and isinstance(lhs, Tagged)
                and lhs.base == ig.start_base and lhs.alpha == ig.start_param):
            out.add(lhs.beta)
    return frozenset(out)


def oracle_outputs(ig: InducedGrammar, lexer: InducedLexer, selector: InducedSelector, D: str, **kw) -> list:
    return sorted_params(ella_outputs(ella_run(ig, lexer, selector, D, **kw), ig))
