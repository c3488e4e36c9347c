"""Translation of a parameterized grammar over a finite domain into an
ordinary context-free grammar, plus the item-level correspondence between
the two.

Induced symbols are ``Tagged(base, alpha, beta)`` (written ``N[a->b]``), the
fresh start ``TOP`` and the failure symbol ``BOT``, which never heads a rule.
"""
from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

from .errors import DomainEscapeError
from .grammar import UNDEFINED, Grammar, ParamFn, Symbol, param_key, sorted_params
from .lexsel import LexerFn, SelectorFn, Token, lex, select
from .pella import Item


class Special:
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name

    def __reduce__(self):
        return self.name

    is_terminal = False


TOP = Special("TOP")
BOT = Special("BOT")


class Tagged(NamedTuple):
    base: Symbol
    alpha: object
    beta: object

    @property
    def is_terminal(self) -> bool:
        return self.base.is_terminal

    def __repr__(self):
        return f"{self.base.name}[{self.alpha!r}->{self.beta!r}]"


def render_symbol(s) -> str:
    if s is TOP or s is BOT:
        return s.name
    return f"{s.base.name}[{s.alpha}->{s.beta}]"


def symbol_key(s) -> tuple:
    if s is TOP:
        return (0,)
    if s is BOT:
        return (2,)
    return (1, s.base.kind, s.base.name, param_key(s.alpha), param_key(s.beta))


class InducedRule:
    """An ordinary rule; equal when lhs and rhs agree (origin is a label)."""

    __slots__ = ("lhs", "rhs", "origin", "_hash")

    def __init__(self, lhs, rhs: Sequence, origin: str):
        self.lhs = lhs
        self.rhs = tuple(rhs)
        self.origin = origin
        self._hash = hash((lhs, self.rhs))

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, InducedRule) and self._hash == other._hash
                and self.lhs == other.lhs and self.rhs == other.rhs)

    def __hash__(self):
        return self._hash

    @property
    def ends_in_bot(self) -> bool:
        return bool(self.rhs) and self.rhs[-1] is BOT

    def key(self) -> tuple:
        return (symbol_key(self.lhs), tuple(symbol_key(s) for s in self.rhs))

    def render(self) -> str:
        rhs = " ".join(render_symbol(s) for s in self.rhs) or "ε"
        return f"{render_symbol(self.lhs)} -> {rhs}"

    def __repr__(self):
        return f"<{self.render()}>"


class EllaItem(NamedTuple):
    rule: InducedRule
    dot: int
    i: int
    j: int

    @property
    def complete(self) -> bool:
        return self.dot == len(self.rule.rhs)

    @property
    def next_symbol(self):
        rhs = self.rule.rhs
        return rhs[self.dot] if self.dot < len(rhs) else None

    def key(self) -> tuple:
        return (self.i, self.j, self.rule.key(), self.dot)

    def __repr__(self):
        syms = [render_symbol(s) for s in self.rule.rhs]
        syms.insert(self.dot, "•")
        return f"({render_symbol(self.rule.lhs)} -> {' '.join(syms)}, {self.i}, {self.j})"


class InducedToken(NamedTuple):
    symbol: Tagged
    chars: str


# -- parameter hulls -------------------------------------------------------

def _apply(f: ParamFn, args: tuple, domain: frozenset, where: str):
    v = f(*args)
    if v is not UNDEFINED and v not in domain:
        raise DomainEscapeError(f"{where}: {f.name}{args!r} = {v!r} is outside the domain")
    return v


def param_hull(fs: Sequence[ParamFn], domain: Iterable) -> frozenset:
    """All sequences of length ``2u`` consistent with ``fs = (f1..fu)``."""
    domain = frozenset(domain)
    if not fs:
        raise ValueError("param_hull needs at least one function")
    out = set()
    for alpha in domain:
        v = _apply(fs[0], (alpha,), domain, "f1")
        if v is UNDEFINED:
            continue
        full, _ = param_hull_extend(fs, (alpha, v), domain)
        out.update((alpha, v) + ext for ext in full)
    return frozenset(out)


def param_hull_extend(fs: Sequence[ParamFn], rho: tuple, domain: Iterable, where: str = "rule"):
    """Extend a valid hull prefix ``rho`` to full length ``2 len(fs)``.

    Returns ``(extensions, witnesses)``: every suffix completing ``rho`` to a
    member of the hull, and every ``(h, xi, gamma)`` where ``xi`` extends
    ``rho`` to a member of the hull of ``fs[:h]`` and ``fs[h]`` is undefined
    at ``xi + (gamma,)``.
    """
    domain = frozenset(domain)
    u = len(fs)
    full, witnesses = [], []
    stack = [tuple(rho)]
    base = len(rho)
    ordered = sorted_params(domain)
    while stack:
        s = stack.pop()
        m = len(s) // 2
        if m == u:
            full.append(s[base:])
            continue
        for gamma in ordered:
            args = s + (gamma,)
            v = _apply(fs[m], args, domain, f"{where} f{m + 1}")
            if v is UNDEFINED:
                witnesses.append((m, s, gamma))
            else:
                stack.append(args + (v,))
    return full, witnesses


# -- induced grammar -------------------------------------------------------

class InducedGrammar:
    def __init__(self, rules: Iterable[InducedRule], start_base: Symbol, start_param, domain):
        seen = {}
        for q in rules:
            seen.setdefault(q, q)
        self.rules = tuple(seen)
        self.start_base = start_base
        self.start_param = start_param
        self.domain = frozenset(domain)
        by_lhs = {}
        for q in self.rules:
            by_lhs.setdefault(q.lhs, []).append(q)
        self.by_lhs = {k: tuple(v) for k, v in by_lhs.items()}

    def __len__(self):
        return len(self.rules)

    def top_rules(self) -> tuple:
        return self.by_lhs.get(TOP, ())

    def listing(self) -> list:
        return [q.render() for q in sorted(self.rules, key=InducedRule.key)]


def _full_rule(r, xi: tuple) -> InducedRule:
    k = r.k
    rhs = [Tagged(r.symbols[m], xi[2 * m + 1], xi[2 * m + 2]) for m in range(k)]
    return InducedRule(Tagged(r.lhs, xi[0], xi[-1]), rhs, r.rule_id)


def _bot_rules(r, h: int, xi: tuple, gamma, domain) -> list:
    # xi = (alpha, a1, b1, ..., a_h); gamma = b_h
    seq = xi + (gamma,)
    rhs = [Tagged(r.symbols[m], seq[2 * m + 1], seq[2 * m + 2]) for m in range(h)]
    rhs.append(BOT)
    return [InducedRule(Tagged(r.lhs, xi[0], beta), rhs, r.rule_id) for beta in domain]


def induce_rule(r, domain) -> list:
    domain = frozenset(domain)
    out = []
    for alpha in sorted_params(domain):
        v = _apply(r.fns[0], (alpha,), domain, f"rule {r.rule_id} f1")
        if v is UNDEFINED:
            continue
        full, witnesses = param_hull_extend(r.fns, (alpha, v), domain, f"rule {r.rule_id}")
        prefix = (alpha, v)
        out.extend(_full_rule(r, prefix + ext) for ext in full)
        for h, xi, gamma in witnesses:
            out.extend(_bot_rules(r, h, xi, gamma, domain))
    return out


def induce_grammar(g: Grammar, domain: Iterable | None = None) -> InducedGrammar:
    """The induced CFG over a finite ``domain`` (defaults to ``g.domain``)."""
    domain = g.domain if domain is None else frozenset(domain)
    if domain is None:
        raise ValueError("induction needs a finite parameter domain")
    if g.start_param not in domain:
        raise DomainEscapeError(f"start parameter {g.start_param!r} outside the domain")
    rules = [InducedRule(TOP, [Tagged(g.start, g.start_param, beta)], "top")
             for beta in sorted_params(domain)]
    for r in g.rules:
        rules.extend(induce_rule(r, domain))
    return InducedGrammar(rules, g.start, g.start_param, domain)


# -- lexer, tokens, selector -----------------------------------------------

def token_bijection(tok: Token) -> InducedToken:
    return InducedToken(Tagged(tok.terminal, tok.alpha, tok.beta), tok.chars)


def token_bijection_inverse(tok: InducedToken) -> Token:
    s = tok.symbol
    return Token(s.base, s.alpha, s.beta, tok.chars)


def lift(tokens: Iterable[Token]) -> frozenset:
    return frozenset(map(token_bijection, tokens))


def unlift(tokens: Iterable[InducedToken]) -> frozenset:
    return frozenset(map(token_bijection_inverse, tokens))


class InducedLexer:
    """``(X, D, k) -> {(X, c)}`` for an induced terminal ``X = t[a->b]``."""

    def __init__(self, lexer: LexerFn):
        self.lexer = lexer

    def __call__(self, X: Tagged, D: str, k: int) -> frozenset:
        return frozenset(InducedToken(X, tok.chars)
                         for tok in lex(self.lexer, X.base, X.alpha, D, k)
                         if tok.beta == X.beta)


def induce_lexer(lexer: LexerFn) -> InducedLexer:
    return InducedLexer(lexer)


class InducedSelector:
    def __init__(self, selector: SelectorFn):
        self.selector = selector

    def __call__(self, A, B) -> frozenset:
        return lift(select(self.selector, unlift(A), unlift(B)))


def induce_selector(selector: SelectorFn) -> InducedSelector:
    return InducedSelector(selector)


# -- item correspondence ---------------------------------------------------

def induce_item(x: Item, domain: Iterable) -> frozenset:
    """The ordinary items a parameterized item stands for."""
    domain = frozenset(domain)
    r, d = x.rule, x.d
    full, witnesses = param_hull_extend(r.fns, x.rho, domain, f"rule {r.rule_id}")
    out = {EllaItem(_full_rule(r, x.rho + ext), d, x.i, x.j) for ext in full}
    for h, xi, gamma in witnesses:
        # every witness extends rho, so h >= d + 1
        for q in _bot_rules(r, h, xi, gamma, domain):
            out.add(EllaItem(q, d, x.i, x.j))
    return frozenset(out)


def norm(items: Iterable[EllaItem]) -> frozenset:
    """Drop TOP-headed items and items whose remainder is exactly ``BOT``."""
    out = set()
    for y in items:
        if y.rule.lhs is TOP:
            continue
        rest = y.rule.rhs[y.dot:]
        if len(rest) == 1 and rest[0] is BOT:
            continue
        out.add(y)
    return frozenset(out)


class Correspondence:
    """Memoizing checker for ``induced(I) == Norm(I')``."""

    def __init__(self, domain: Iterable):
        self.domain = frozenset(domain)
        self._cache = {}

    def induce(self, I: Iterable[Item]) -> frozenset:
        out = set()
        for x in I:
            s = self._cache.get(x)
            if s is None:
                s = self._cache[x] = induce_item(x, self.domain)
            out |= s
        return frozenset(out)

    def check(self, I: Iterable[Item], I2: Iterable[EllaItem]):
        """Return ``(ok, only_pella, only_ella)``."""
        left = self.induce(I)
        right = norm(I2)
        return left == right, left - right, right - left


def corresponds(I: Iterable[Item], I2: Iterable[EllaItem], domain: Iterable):
    """``(ok, report)``; the report lists items present on one side only."""
    ok, only_left, only_right = Correspondence(domain).check(I, I2)
    report = []
    for y in sorted(only_left, key=EllaItem.key):
        report.append(f"induced only: {y!r}")
    for y in sorted(only_right, key=EllaItem.key):
        report.append(f"oracle only:  {y!r}")
    return ok, report
