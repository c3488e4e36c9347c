"""Parameters, symbols, partial parameter functions and parameterized grammars.

A rule ``N_{f[k]} -> X1^{f[0]} ... Xk^{f[k-1]}`` carries one partial
function per right-hand-side position plus one for the output parameter.
Position ``i`` (1-based) receives the ``2i - 1`` parameters chosen so far:
the rule input ``a``, then ``a1, b1, ..., a_{i-1}, b_{i-1}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, NamedTuple, Sequence

from .errors import ArityError

Parameter = Hashable

NONTERMINAL = "N"
TERMINAL = "T"


class _Undefined:
    __slots__ = ()

    def __repr__(self) -> str:
        return "UNDEFINED"

    def __bool__(self) -> bool:
        return False

    def __reduce__(self):
        return "UNDEFINED"


#: The outcome of a partial function outside its domain of definition.
UNDEFINED = _Undefined()


def param_key(p: Parameter) -> tuple:
    """Canonical sort key for parameters (serialization only)."""
    if isinstance(p, bool):
        return (1, repr(p))
    if isinstance(p, int):
        return (0, p)
    return (2, type(p).__name__, repr(p))


def sorted_params(params: Iterable[Parameter]) -> list:
    return sorted(params, key=param_key)


class Symbol(NamedTuple):
    kind: str
    name: str

    @property
    def is_terminal(self) -> bool:
        return self.kind == TERMINAL

    def __str__(self) -> str:
        return self.name


def nt(name: str) -> Symbol:
    return Symbol(NONTERMINAL, name)


def term(name: str) -> Symbol:
    return Symbol(TERMINAL, name)


@dataclass(frozen=True, eq=False)
class ParamFn:
    """A partial function ``Phi^arity -> Phi``.

    ``evaluator`` receives the arguments positionally and returns either a
    parameter or ``UNDEFINED``. It must be pure.
    """

    arity: int
    evaluator: Callable[..., Any]
    name: str = "<fn>"

    def __call__(self, *args: Parameter) -> Any:
        return param_fn_apply(self, args)

    def __repr__(self) -> str:
        return f"ParamFn({self.name}/{self.arity})"


def param_fn_apply(f: ParamFn, args: Sequence[Parameter]) -> Any:
    """Evaluate ``f`` at ``args``; returns a parameter or ``UNDEFINED``.

    Raises ArityError when ``len(args)`` does not match ``f.arity``; that is a
    programming error, never an ordinary "undefined".
    """
    if len(args) != f.arity:
        raise ArityError(f"{f.name} expects {f.arity} arguments, got {len(args)}")
    return f.evaluator(*args)


def identity_fn(name: str = "id") -> ParamFn:
    return ParamFn(1, lambda a: a, name)


def const_fn(arity: int, value: Parameter, name: str | None = None) -> ParamFn:
    return ParamFn(arity, lambda *args: value, name or f"const({value!r})")


def projection_fn(arity: int, index: int, name: str | None = None) -> ParamFn:
    """The function returning its ``index``-th argument (0-based)."""
    if not 0 <= index < arity:
        raise ValueError(f"projection index {index} outside arity {arity}")
    return ParamFn(arity, lambda *args: args[index], name or f"p{index}")


def undefined_fn(arity: int, name: str = "undef") -> ParamFn:
    return ParamFn(arity, lambda *args: UNDEFINED, name)


@dataclass(frozen=True, eq=False)
class Rule:
    """A parameterized rule. Compared by identity; ``rule_id`` names it."""

    rule_id: str
    lhs: Symbol
    rhs: tuple  # of (Symbol, ParamFn)
    out: ParamFn

    def __post_init__(self):
        object.__setattr__(self, "rhs", tuple((s, f) for s, f in self.rhs))
        object.__setattr__(self, "symbols", tuple(s for s, _ in self.rhs))
        object.__setattr__(self, "fns", tuple(f for _, f in self.rhs) + (self.out,))

    @property
    def k(self) -> int:
        return len(self.rhs)

    def __repr__(self) -> str:
        body = " ".join(s.name for s in self.symbols) or "ε"
        return f"<Rule {self.rule_id}: {self.lhs.name} -> {body}>"


def rule_arity_table(r: Rule) -> tuple:
    """Expected arities ``(1, 3, ..., 2k+1)`` of the rule's functions."""
    return tuple(2 * i - 1 for i in range(1, r.k + 2))


@dataclass(frozen=True)
class Grammar:
    nonterminals: frozenset
    terminals: frozenset
    rules: tuple
    start: Symbol
    start_param: Parameter
    alphabet: frozenset = frozenset()
    domain: frozenset | None = None
    rules_by_lhs: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "nonterminals", frozenset(self.nonterminals))
        object.__setattr__(self, "terminals", frozenset(self.terminals))
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "alphabet", frozenset(self.alphabet))
        if self.domain is not None:
            object.__setattr__(self, "domain", frozenset(self.domain))
        by_lhs: dict = {}
        for r in self.rules:
            by_lhs.setdefault(r.lhs, []).append(r)
        object.__setattr__(self, "rules_by_lhs", {k: tuple(v) for k, v in by_lhs.items()})

    def rule(self, rule_id: str) -> Rule:
        for r in self.rules:
            if r.rule_id == rule_id:
                return r
        raise KeyError(rule_id)


class Violation(NamedTuple):
    code: str
    message: str


def validate_grammar(g: Grammar) -> list:
    """Check the structural invariants of ``g``; an empty list means ok."""
    out = []
    clash = {s.name for s in g.nonterminals} & {s.name for s in g.terminals}
    if clash:
        out.append(Violation("namespace", f"symbols both terminal and nonterminal: {sorted(clash)}"))
    for s in g.nonterminals:
        if s.kind != NONTERMINAL:
            out.append(Violation("kind", f"{s.name} listed as nonterminal but tagged {s.kind}"))
    for s in g.terminals:
        if s.kind != TERMINAL:
            out.append(Violation("kind", f"{s.name} listed as terminal but tagged {s.kind}"))
    if g.start not in g.nonterminals:
        out.append(Violation("unknown start", f"start symbol {g.start.name} is not a declared nonterminal"))
    if g.domain is not None and g.start_param not in g.domain:
        out.append(Violation("start param", f"start parameter {g.start_param!r} outside domain"))
    seen = set()
    declared = g.nonterminals | g.terminals
    for r in g.rules:
        if r.rule_id in seen:
            out.append(Violation("duplicate rule id", f"rule id {r.rule_id} used twice"))
        seen.add(r.rule_id)
        if r.lhs not in g.nonterminals:
            out.append(Violation("unknown symbol", f"rule {r.rule_id}: lhs {r.lhs.name} not a nonterminal"))
        for s in r.symbols:
            if s not in declared:
                out.append(Violation("unknown symbol", f"rule {r.rule_id}: {s.name} not declared"))
        for pos, (f, want) in enumerate(zip(r.fns, rule_arity_table(r)), start=1):
            if not isinstance(f, ParamFn):
                out.append(Violation("function", f"rule {r.rule_id}: f{pos} is not a ParamFn"))
            elif f.arity != want:
                out.append(Violation("arity", f"rule {r.rule_id}: f{pos} has arity {f.arity}, expected {want}"))
    return out
