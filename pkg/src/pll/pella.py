"""Earley-style recognition for parameterized local lexing.

Items are ``(rule, d, i, j, rho)``: the dot sits after ``d`` right-hand-side
symbols, the item spans ``D[i:j]`` and ``rho`` records the ``2(d+1)``
parameters chosen so far. ``rho[2d+1]`` is the input parameter of the next
symbol, or the rule's output once the item is complete.

The module exposes the building blocks as pure set functions (``pella_init``,
``pella_predict``, ``pella_complete``, ``pella_tokens``, ``pella_scan``,
``pella_pi``) and a driver, ``pella_run``, that evaluates the chart
recurrences with an indexed worklist. ``pella_run(..., literal=True)`` drives
the same recurrences through the set functions instead, which is slow but
transparently faithful; the test-suite checks both agree.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Optional

from .errors import InternalInvariantError, ResourceExhausted
from .grammar import UNDEFINED, Grammar, Rule, param_key, sorted_params
from .lexsel import LexerFn, SelectorFn, Token, lex, select


class Item(NamedTuple):
    rule: Rule
    d: int
    i: int
    j: int
    rho: tuple

    @property
    def complete(self) -> bool:
        return self.d == self.rule.k

    @property
    def next_symbol(self):
        return None if self.d == self.rule.k else self.rule.symbols[self.d]

    @property
    def next_param(self):
        return self.rho[2 * self.d + 1]

    def __repr__(self):
        syms = [s.name for s in self.rule.symbols]
        syms.insert(self.d, "•")
        return f"({self.rule.lhs.name} -> {' '.join(syms)}, {self.i}, {self.j}, {self.rho!r})"


def item_key(x: Item) -> tuple:
    """Canonical order: (i, j, rule id, d, rho)."""
    return (x.i, x.j, x.rule.rule_id, x.d, tuple(param_key(p) for p in x.rho))


def item_to_json(x: Item) -> dict:
    return {"rule": x.rule.rule_id, "d": x.d, "i": x.i, "j": x.j, "rho": list(x.rho)}


def in_hull(rule: Rule, rho: tuple) -> bool:
    """Whether ``rho`` satisfies the defined/equality chain of ``rule.fns``."""
    if len(rho) % 2 or not rho:
        return False
    for m in range(1, len(rho) // 2 + 1):
        v = rule.fns[m - 1](*rho[:2 * m - 1])
        if v is UNDEFINED or v != rho[2 * m - 1]:
            return False
    return True


def check_item(x: Item, n: int, verify: bool = False) -> None:
    k = x.rule.k
    if not (0 <= x.d <= k and 0 <= x.i <= x.j <= n):
        raise InternalInvariantError(f"malformed item {x!r}")
    if len(x.rho) != 2 * (x.d + 1):
        raise InternalInvariantError(f"item {x!r} has |rho| != 2(d+1)")
    if verify and not in_hull(x.rule, x.rho):
        raise InternalInvariantError(f"item {x!r} violates its parameter chain")


@dataclass(frozen=True)
class EngineLimits:
    max_items: int = 2_000_000
    max_rounds: int = 100_000

    def __post_init__(self):
        if self.max_items <= 0 or self.max_rounds <= 0:
            raise ValueError("engine limits must be positive")


def _advance(x: Item, value, end: int) -> Optional[Item]:
    rho = x.rho + (value,)
    v = x.rule.fns[x.d + 1](*rho)
    if v is UNDEFINED:
        return None
    return Item(x.rule, x.d + 1, x.i, end, rho + (v,))


# -- building blocks -------------------------------------------------------

def pella_init(g: Grammar) -> frozenset:
    out = set()
    for r in g.rules_by_lhs.get(g.start, ()):
        v = r.fns[0](g.start_param)
        if v is not UNDEFINED:
            out.add(Item(r, 0, 0, 0, (g.start_param, v)))
    return frozenset(out)


def pella_predict(g: Grammar, k: int, I: Iterable[Item]) -> frozenset:
    I = frozenset(I)
    new = set()
    for x in I:
        if x.j != k:
            continue
        M = x.next_symbol
        if M is None or M.is_terminal:
            continue
        alpha = x.next_param
        for r in g.rules_by_lhs.get(M, ()):
            v = r.fns[0](alpha)
            if v is not UNDEFINED:
                new.add(Item(r, 0, k, k, (alpha, v)))
    return I | new


def pella_complete(g: Grammar, k: int, I: Iterable[Item]) -> frozenset:
    I = frozenset(I)
    children = {}
    for z in I:
        if z.j == k and z.complete:
            children.setdefault((z.rule.lhs, z.rho[0], z.i), []).append(z)
    new = set()
    for y in I:
        M = y.next_symbol
        if M is None or M.is_terminal:
            continue
        for z in children.get((M, y.next_param, y.j), ()):
            x = _advance(y, z.rho[-1], k)
            if x is not None:
                new.add(x)
    return I | new


def pella_tokens(g: Grammar, lexer: LexerFn, selector: SelectorFn, D: str,
                 T: Iterable[Token], k: int, I: Iterable[Item]) -> frozenset:
    T = frozenset(T)
    W = set()
    for x in I:
        t = x.next_symbol if x.j == k else None
        if t is not None and t.is_terminal:
            W |= lex(lexer, t, x.next_param, D, k)
    if not T <= W:
        raise InternalInvariantError(
            f"previously selected tokens vanished at position {k}: {sorted(T - W)!r}")
    return select(selector, T, W)


def pella_scan(g: Grammar, T: Iterable[Token], k: int, I: Iterable[Item]) -> frozenset:
    I = frozenset(I)
    by_query = {}
    for tok in T:
        by_query.setdefault((tok.terminal, tok.alpha), []).append(tok)
    new = set()
    for x in I:
        t = x.next_symbol if x.j == k else None
        if t is None or not t.is_terminal:
            continue
        for tok in by_query.get((t, x.next_param), ()):
            y = _advance(x, tok.beta, k + len(tok.chars))
            if y is not None:
                new.add(y)
    return I | new


def pella_pi(g: Grammar, T: Iterable[Token], k: int, I: Iterable[Item]) -> frozenset:
    """Least fixpoint of ``Scan T k . Complete k . Predict k`` above ``I``."""
    T = frozenset(T)
    cur = frozenset(I)
    while True:
        nxt = pella_scan(g, T, k, pella_complete(g, k, pella_predict(g, k, cur)))
        if nxt == cur:
            return cur
        cur = nxt


# -- chart and driver ------------------------------------------------------

@dataclass
class Chart:
    input: str
    bins: list
    tokens: list
    stats: dict = field(default_factory=dict)

    @property
    def items(self) -> frozenset:
        return frozenset().union(*self.bins)

    def __len__(self):
        return sum(len(b) for b in self.bins)

    def sorted_items(self) -> list:
        return sorted(self.items, key=item_key)


Trace = Callable[[int, int, frozenset, frozenset], None]


class _Run:
    """Mutable state of one run: the chart plus its indices."""

    def __init__(self, g, lexer, selector, D, limits, verify):
        self.g = g
        self.lexer = lexer
        self.selector = selector
        self.D = D
        self.n = len(D)
        self.limits = limits
        self.verify = verify
        self.bins = [set() for _ in range(self.n + 1)]
        # (symbol, input param) -> items at bin j with the dot before symbol
        self.waiting = [{} for _ in range(self.n + 1)]
        # (lhs, input param) -> completed items ending at bin j
        self.done = [{} for _ in range(self.n + 1)]
        self.count = 0
        self.agenda = []
        self.k = 0
        self.lex_cache = {}
        self.stats = {"pi_calls": 0, "pi_checked": 0, "rounds": 0, "token_checks": 0}

    def add(self, x: Item) -> None:
        b = self.bins[x.j]
        if x in b:
            return
        if self.verify:
            check_item(x, self.n, verify=True)
        self.count += 1
        if self.count > self.limits.max_items:
            raise ResourceExhausted(f"more than {self.limits.max_items} items at position {self.k}", self.k)
        b.add(x)
        if x.complete:
            self.done[x.j].setdefault((x.rule.lhs, x.rho[0]), []).append(x)
        else:
            self.waiting[x.j].setdefault((x.next_symbol, x.next_param), []).append(x)
        if x.j == self.k:
            self.agenda.append(x)

    def pi(self, T: frozenset) -> None:
        k = self.k
        by_query = {}
        for tok in T:
            by_query.setdefault((tok.terminal, tok.alpha), []).append(tok)
        rules_by_lhs = self.g.rules_by_lhs
        self.agenda = list(self.bins[k])
        predicted = set()
        while self.agenda:
            x = self.agenda.pop()
            if x.complete:
                key = (x.rule.lhs, x.rho[0])
                out = x.rho[-1]
                for y in list(self.waiting[x.i].get(key, ())):
                    z = _advance(y, out, k)
                    if z is not None:
                        self.add(z)
                continue
            X = x.next_symbol
            alpha = x.next_param
            if X.is_terminal:
                for tok in by_query.get((X, alpha), ()):
                    z = _advance(x, tok.beta, k + len(tok.chars))
                    if z is not None:
                        self.add(z)
                continue
            if (X, alpha) not in predicted:
                predicted.add((X, alpha))
                for r in rules_by_lhs.get(X, ()):
                    v = r.fns[0](alpha)
                    if v is not UNDEFINED:
                        self.add(Item(r, 0, k, k, (alpha, v)))
            for z in list(self.done[k].get((X, alpha), ())):
                if z.i == k:
                    w = _advance(x, z.rho[-1], k)
                    if w is not None:
                        self.add(w)

    def tokens(self, T: frozenset) -> frozenset:
        k = self.k
        W = set()
        for (X, alpha), xs in self.waiting[k].items():
            if X.is_terminal and xs:
                key = (X, alpha, k)
                toks = self.lex_cache.get(key)
                if toks is None:
                    toks = self.lex_cache[key] = lex(self.lexer, X, alpha, self.D, k)
                W |= toks
        self.stats["token_checks"] += 1
        if not T <= W:
            raise InternalInvariantError(
                f"previously selected tokens vanished at position {k}: {sorted(T - W)!r}")
        return select(self.selector, T, W)

    def snapshot(self) -> frozenset:
        return frozenset().union(*self.bins)

    def run_pi(self, T: frozenset) -> None:
        self.stats["pi_calls"] += 1
        if not self.verify:
            self.pi(T)
            return
        before = self.snapshot()
        self.pi(T)
        after = self.snapshot()
        expected = pella_pi(self.g, T, self.k, before)
        if after != expected:
            raise InternalInvariantError(f"worklist closure differs from the literal fixpoint at {self.k}")
        if not before <= after:
            raise InternalInvariantError(f"pi is not extensive at {self.k}")
        if pella_pi(self.g, T, self.k, after) != after:
            raise InternalInvariantError(f"pi is not idempotent at {self.k}")
        self.stats["pi_checked"] += 1


def pella_run(g: Grammar, lexer: LexerFn, selector: SelectorFn, D: str,
              limits: EngineLimits = EngineLimits(), *, verify: bool = False,
              trace: Optional[Trace] = None, literal: bool = False) -> Chart:
    """Recognize ``D`` and return the final chart.

    ``trace(k, u, J, T)`` is called at every checkpoint with the item set
    ``J_k^u`` and token set ``T_k^u``. ``verify`` checks every item's
    parameter chain and cross-checks each closure against ``pella_pi``.
    """
    if literal:
        return _run_literal(g, lexer, selector, D, limits, trace)
    run = _Run(g, lexer, selector, D, limits, verify)
    T = frozenset()
    for x in pella_init(g):
        run.add(x)
    tokens_by_pos = []
    for k in range(run.n + 1):
        run.k = k
        run.run_pi(frozenset())
        T = frozenset()
        u = 0
        if trace:
            trace(k, u, run.snapshot(), T)
        while True:
            size = run.count
            T_next = run.tokens(T)
            run.run_pi(T_next)
            u += 1
            run.stats["rounds"] += 1
            if u > limits.max_rounds:
                raise ResourceExhausted(f"token iteration did not stabilize at position {k}", k)
            if trace:
                trace(k, u, run.snapshot(), T_next)
            stable = T_next == T and run.count == size
            T = T_next
            if stable:
                break
        tokens_by_pos.append(T)
    stats = dict(run.stats, items=run.count, positions=run.n + 1)
    return Chart(D, [frozenset(b) for b in run.bins], tokens_by_pos, stats)


def _run_literal(g, lexer, selector, D, limits, trace) -> Chart:
    n = len(D)
    tokens_by_pos = []
    I = pella_init(g)
    rounds = 0
    for k in range(n + 1):
        J = pella_pi(g, frozenset(), k, I)
        T = frozenset()
        u = 0
        if trace:
            trace(k, u, J, T)
        while True:
            T_next = pella_tokens(g, lexer, selector, D, T, k, J)
            J_next = pella_pi(g, T_next, k, J)
            u += 1
            rounds += 1
            if u > limits.max_rounds:
                raise ResourceExhausted(f"token iteration did not stabilize at position {k}", k)
            if trace:
                trace(k, u, J_next, T_next)
            stable = T_next == T and J_next == J
            T, J = T_next, J_next
            if stable:
                break
        tokens_by_pos.append(T)
        I = J
    bins = [frozenset(x for x in I if x.j == j) for j in range(n + 1)]
    return Chart(D, bins, tokens_by_pos, {"rounds": rounds, "items": len(I), "positions": n + 1})


def pella_outputs(chart: Chart, g: Grammar) -> frozenset:
    """Output parameters of completed start items spanning the whole input."""
    n = len(chart.input)
    return frozenset(
        x.rho[-1] for x in chart.bins[n]
        if x.i == 0 and x.complete and x.rule.lhs == g.start and x.rho[0] == g.start_param)


def recognize(g: Grammar, lexer: LexerFn, selector: SelectorFn, D: str, **kw) -> list:
    """Sorted outputs of ``D``; empty iff ``D`` is rejected."""
    return sorted_params(pella_outputs(pella_run(g, lexer, selector, D, **kw), g))
