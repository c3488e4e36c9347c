"""Tokens, lexers and selectors.

A lexer maps ``(t, alpha, D, k)`` to a finite set of tokens ``(t, alpha,
beta, c)`` where ``c`` is a slice of ``D`` starting at ``k``. A selector
picks among candidate tokens with the contract ``A <= Sel(A, B) <= B``.
Both are foreign code from the engine's point of view, so the wrappers here
re-check their contracts on every call.
"""
from __future__ import annotations

from typing import Callable, Iterable, Mapping, NamedTuple

from .errors import LexerContractError, SelectorContractError, InternalInvariantError
from .grammar import UNDEFINED, ParamFn, Parameter, Symbol, param_fn_apply


class Token(NamedTuple):
    terminal: Symbol
    alpha: Parameter
    beta: Parameter
    chars: str


class LexerFn:
    """A lexer: ``evaluator(t, alpha, D, k)`` yields tokens."""

    def __init__(self, evaluator: Callable[[Symbol, Parameter, str, int], Iterable[Token]], name: str = "lexer"):
        self.evaluator = evaluator
        self.name = name

    def __call__(self, t, alpha, D, k):
        return lex(self, t, alpha, D, k)

    def __repr__(self):
        return f"LexerFn({self.name})"


class SelectorFn:
    """A selector: ``evaluator(A, B)`` returns a token set between A and B."""

    def __init__(self, evaluator: Callable[[frozenset, frozenset], Iterable[Token]], name: str = "selector"):
        self.evaluator = evaluator
        self.name = name

    def __call__(self, A, B):
        return select(self, A, B)

    def __repr__(self):
        return f"SelectorFn({self.name})"


def check_token(tok, t, alpha, D: str, k: int) -> None:
    if not isinstance(tok, Token):
        raise LexerContractError(f"lexer returned non-token {tok!r}", tok)
    if tok.terminal != t or tok.alpha != alpha:
        raise LexerContractError(
            f"token {tok!r} does not echo query ({t.name}, {alpha!r})", tok)
    c = tok.chars
    if not isinstance(c, str) or k + len(c) > len(D) or D[k:k + len(c)] != c:
        raise LexerContractError(
            f"token {tok!r} does not match input at position {k}", tok)


def lex(l: LexerFn, t: Symbol, alpha: Parameter, D: str, k: int) -> frozenset:
    """Run ``l`` for terminal ``t`` and check every returned token."""
    if not t.is_terminal:
        raise ValueError(f"{t.name} is not a terminal")
    if not 0 <= k <= len(D):
        raise ValueError(f"position {k} outside 0..{len(D)}")
    result = frozenset(l.evaluator(t, alpha, D, k))
    for tok in result:
        check_token(tok, t, alpha, D, k)
    return result


def select(s: SelectorFn, A: Iterable[Token], B: Iterable[Token]) -> frozenset:
    """Run ``s`` and check ``A <= result <= B``."""
    A = frozenset(A)
    B = frozenset(B)
    if not A <= B:
        raise InternalInvariantError(
            f"selector called with A not a subset of B: {sorted(A - B)!r}")
    R = frozenset(s.evaluator(A, B))
    if not A <= R:
        raise SelectorContractError(f"{s.name} dropped previously selected tokens {sorted(A - R)!r}")
    if not R <= B:
        raise SelectorContractError(f"{s.name} invented tokens {sorted(R - B)!r}")
    return R


# -- built-in lexers -------------------------------------------------------

def _out(out_fn: ParamFn, *args):
    return param_fn_apply(out_fn, args)


def lexer_literal(text: str, out: ParamFn) -> LexerFn:
    """Match ``text`` exactly; output ``out(alpha)``. ``text`` may be empty."""
    if out.arity != 1:
        raise ValueError("literal lexer output function takes (alpha)")

    def run(t, alpha, D, k):
        if not D.startswith(text, k):
            return ()
        beta = _out(out, alpha)
        if beta is UNDEFINED:
            return ()
        return (Token(t, alpha, beta, text),)

    return LexerFn(run, f"literal({text!r})")


class CharClass:
    """A set of characters given by explicit characters and ranges."""

    def __init__(self, ranges: Iterable[tuple], negated: bool = False):
        self.ranges = tuple((lo, hi) for lo, hi in ranges)
        self.negated = negated

    @classmethod
    def of(cls, chars: str) -> "CharClass":
        return cls([(c, c) for c in chars])

    def __contains__(self, ch: str) -> bool:
        hit = any(lo <= ch <= hi for lo, hi in self.ranges)
        return hit != self.negated

    def __eq__(self, other):
        return isinstance(other, CharClass) and (self.ranges, self.negated) == (other.ranges, other.negated)

    def __hash__(self):
        return hash((self.ranges, self.negated))

    def __repr__(self):
        return f"CharClass({self.ranges!r}, negated={self.negated})"


GREEDY = "greedy"
ALL_LENGTHS = "all"


def lexer_charspan(cls: CharClass, mode: str, out: ParamFn, min_len: int = 1) -> LexerFn:
    """Match runs of characters from ``cls``.

    ``greedy`` yields only the maximal run, ``all`` every run length from
    ``min_len`` up to the maximum. ``out`` receives ``(alpha, length)``.
    """
    if mode not in (GREEDY, ALL_LENGTHS):
        raise ValueError(f"unknown span mode {mode!r}")
    if out.arity != 2:
        raise ValueError("span lexer output function takes (alpha, length)")

    def run(t, alpha, D, k):
        end = k
        while end < len(D) and D[end] in cls:
            end += 1
        longest = end - k
        lengths = [longest] if mode == GREEDY else range(min_len, longest + 1)
        toks = []
        for n in lengths:
            if n < min_len:
                continue
            beta = _out(out, alpha, n)
            if beta is not UNDEFINED:
                toks.append(Token(t, alpha, beta, D[k:k + n]))
        return toks

    return LexerFn(run, f"span({mode})")


def lexer_count(cls: CharClass, count: ParamFn, out: ParamFn) -> LexerFn:
    """Consume exactly ``count(alpha)`` characters of ``cls``.

    No token when the count is undefined, negative, or the input has fewer
    matching characters. ``out`` receives ``(alpha, n)``.
    """
    if count.arity != 1 or out.arity != 2:
        raise ValueError("count lexer takes count(alpha) and out(alpha, n)")

    def run(t, alpha, D, k):
        n = _out(count, alpha)
        if n is UNDEFINED or not isinstance(n, int) or n < 0 or k + n > len(D):
            return ()
        if any(ch not in cls for ch in D[k:k + n]):
            return ()
        beta = _out(out, alpha, n)
        if beta is UNDEFINED:
            return ()
        return (Token(t, alpha, beta, D[k:k + n]),)

    return LexerFn(run, "count")


def lexer_table(table: Mapping[Symbol, LexerFn]) -> LexerFn:
    """Dispatch by terminal; unknown terminals lex nothing."""
    table = dict(table)

    def run(t, alpha, D, k):
        l = table.get(t)
        if l is None:
            return ()
        return l.evaluator(t, alpha, D, k)

    return LexerFn(run, "table")


# -- built-in selectors ----------------------------------------------------

def selector_all() -> SelectorFn:
    return SelectorFn(lambda A, B: B, "all")


def selector_longest() -> SelectorFn:
    """Keep the candidates with the longest match, plus everything in A."""
    def run(A, B):
        if not B:
            return A
        n = max(len(tok.chars) for tok in B)
        return A | {tok for tok in B if len(tok.chars) == n}

    return SelectorFn(run, "longest")


def selector_priority(ranking: Iterable[Symbol]) -> SelectorFn:
    """Keep candidates whose terminal ranks best; unranked terminals rank last."""
    ranking = tuple(ranking)
    rank = {t: i for i, t in enumerate(ranking)}
    worst = len(ranking)

    def run(A, B):
        if not B:
            return A
        best = min(rank.get(tok.terminal, worst) for tok in B)
        return A | {tok for tok in B if rank.get(tok.terminal, worst) == best}

    return SelectorFn(run, "priority(" + " ".join(t.name for t in ranking) + ")")
