"""A small line-oriented grammar language.

Example::

    domain 0..8
    start S 0
    selector all
    terminal a = char 'a' out a+1
    rule S -> { out = a }
    rule S -> a S { in1 = a ; in2 = b1 ; out = b2 }

Parameters are integers. Functions are integer expressions over the
parameters chosen so far (``a`` is the rule input, ``ai``/``bi`` the input and
output of the i-th right-hand-side symbol), optionally followed by ``when``
and a guard. A function is undefined where its guard is false or its value
falls outside the declared domain.

Terminal lexers:

* ``char 'x'`` / ``literal "xyz"`` -- an exact string (``""`` is an empty token)
* ``span CLASS greedy|all`` -- runs of class characters; ``len`` is the run length
* ``count CLASS n = EXPR [when GUARD]`` -- exactly ``n`` class characters

each followed by ``out EXPR [when GUARD]``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .errors import DslError, GrammarError
from .grammar import UNDEFINED, Grammar, ParamFn, Rule, nt, term, validate_grammar
from .lexsel import (ALL_LENGTHS, GREEDY, CharClass, LexerFn, SelectorFn, lexer_charspan, lexer_count,
                     lexer_literal, lexer_table, selector_all, selector_longest, selector_priority)


class Diagnostic(NamedTuple):
    line: int
    col: int
    message: str

    def __str__(self):
        return f"{self.line}:{self.col}: {self.message}"


# -- AST -------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple


@dataclass(frozen=True)
class Cmp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class BoolOp:
    op: str  # "and" | "or"
    left: object
    right: object


@dataclass(frozen=True)
class Not:
    operand: object


@dataclass(frozen=True)
class FnDecl:
    expr: object
    guard: object = None


@dataclass
class TerminalDecl:
    name: str
    kind: str  # char | literal | span | count
    text: str = ""
    cls: Optional[str] = None  # source form of the class, e.g. "[a-z]"
    mode: str = GREEDY
    count: Optional[FnDecl] = None
    out: Optional[FnDecl] = None
    line: int = 0


@dataclass
class RuleDecl:
    lhs: str
    rhs: list
    fns: list  # FnDecl for in1..ink, out
    line: int = 0


@dataclass
class GrammarDoc:
    domain: Optional[tuple] = None
    start: Optional[tuple] = None
    selector: tuple = ("all",)
    terminals: list = field(default_factory=list)
    rules: list = field(default_factory=list)


# -- tokenizer -------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#.*)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<char>'(?:[^'\\]|\\.)')
  | (?P<cls>\[\^?(?:[^\]\\]|\\.)+\])
  | (?P<op>->|\.\.|<=|>=|==|!=|[{};=()+\-*<>,])
""", re.VERBOSE)


class Tok(NamedTuple):
    kind: str
    text: str
    col: int


def _tokenize(line: str, lineno: int) -> list:
    out, pos = [], 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if not m:
            raise _Fail(lineno, pos + 1, f"unexpected character {line[pos]!r}")
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            out.append(Tok(kind, m.group(), pos + 1))
        pos = m.end()
    return out


class _Fail(Exception):
    def __init__(self, line, col, message):
        super().__init__(message)
        self.diag = Diagnostic(line, col, message)


_ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", "'": "'", '"': '"', "]": "]", "-": "-", "^": "^", "s": " "}


def _unescape(body: str) -> str:
    out, i = [], 0
    while i < len(body):
        c = body[i]
        if c == "\\" and i + 1 < len(body):
            out.append(_ESCAPES.get(body[i + 1], body[i + 1]))
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def parse_class(src: str) -> CharClass:
    """``'x'`` or ``[...]`` with ranges, ``^`` negation and backslash escapes."""
    if src.startswith("'"):
        return CharClass.of(_unescape(src[1:-1]))
    body = src[1:-1]
    negated = body.startswith("^")
    if negated:
        body = body[1:]
    # (char, escaped) pairs; an unescaped '-' between two chars forms a range
    chars, j = [], 0
    while j < len(body):
        if body[j] == "\\" and j + 1 < len(body):
            chars.append((_ESCAPES.get(body[j + 1], body[j + 1]), True))
            j += 2
        else:
            chars.append((body[j], False))
            j += 1
    ranges, i = [], 0
    while i < len(chars):
        c = chars[i][0]
        if i + 2 < len(chars) and chars[i + 1] == ("-", False):
            ranges.append((c, chars[i + 2][0]))
            i += 3
        else:
            ranges.append((c, c))
            i += 1
    return CharClass(ranges, negated)


# -- parser ----------------------------------------------------------------

class _Line:
    def __init__(self, toks, lineno):
        self.toks = toks
        self.pos = 0
        self.lineno = lineno

    def peek(self, offset=0):
        i = self.pos + offset
        return self.toks[i] if i < len(self.toks) else None

    def col(self):
        t = self.peek()
        return t.col if t else (self.toks[-1].col + len(self.toks[-1].text) if self.toks else 1)

    def fail(self, msg):
        raise _Fail(self.lineno, self.col(), msg)

    def at(self, *texts):
        t = self.peek()
        return t is not None and t.text in texts and t.kind in ("op", "name")

    def take(self, kind=None, text=None):
        t = self.peek()
        if t is None:
            self.fail(f"expected {text or kind}, found end of line")
        if (kind and t.kind != kind) or (text and t.text != text):
            self.fail(f"expected {text or kind}, found {t.text!r}")
        self.pos += 1
        return t

    def accept(self, text):
        if self.at(text):
            self.pos += 1
            return True
        return False

    def end(self):
        if self.peek() is not None:
            self.fail(f"unexpected {self.peek().text!r}")

    def signed_int(self):
        neg = self.accept("-")
        v = int(self.take("int").text)
        return -v if neg else v

    # expressions
    def expr(self):
        e = self.term()
        while self.at("+", "-"):
            op = self.take().text
            e = BinOp(op, e, self.term())
        return e

    def term(self):
        e = self.unary()
        while self.at("*"):
            self.take()
            e = BinOp("*", e, self.unary())
        return e

    def unary(self):
        if self.accept("-"):
            return Neg(self.unary())
        return self.atom()

    def atom(self):
        t = self.peek()
        if t is None:
            self.fail("expected expression")
        if t.kind == "int":
            self.pos += 1
            return Num(int(t.text))
        if t.kind == "name" and t.text in ("min", "max"):
            self.pos += 1
            self.take(text="(")
            args = [self.expr()]
            while self.accept(","):
                args.append(self.expr())
            self.take(text=")")
            return Call(t.text, tuple(args))
        if t.kind == "name" and t.text not in _KEYWORDS:
            self.pos += 1
            return Var(t.text)
        if self.accept("("):
            e = self.expr()
            self.take(text=")")
            return e
        self.fail(f"expected expression, found {t.text!r}")

    def guard(self):
        g = self.conj()
        while self.accept("or"):
            g = BoolOp("or", g, self.conj())
        return g

    def conj(self):
        g = self.neg()
        while self.accept("and"):
            g = BoolOp("and", g, self.neg())
        return g

    def neg(self):
        if self.accept("not"):
            return Not(self.neg())
        if self.at("("):
            # either a parenthesized guard or an expression starting with '('
            save = self.pos
            self.take()
            try:
                g = self.guard()
                self.take(text=")")
                return g
            except _Fail:
                self.pos = save
        left = self.expr()
        t = self.peek()
        if t is None or t.text not in ("<", "<=", ">", ">=", "==", "!="):
            self.fail("expected comparison operator")
        self.pos += 1
        return Cmp(t.text, left, self.expr())

    def fn_decl(self):
        e = self.expr()
        g = self.guard() if self.accept("when") else None
        return FnDecl(e, g)


_KEYWORDS = {"domain", "start", "selector", "terminal", "rule", "out", "when", "and", "or", "not",
             "min", "max", "char", "literal", "span", "count", "greedy", "all", "longest", "priority"}
_IN = re.compile(r"in([1-9]\d*)$")


def _parse_terminal(p: _Line) -> TerminalDecl:
    lineno = p.lineno
    name = p.take("name").text
    p.take(text="=")
    kind_tok = p.take("name")
    kind = kind_tok.text
    decl = TerminalDecl(name, kind, line=lineno)
    if kind == "char":
        decl.text = _unescape(p.take("char").text[1:-1])
    elif kind == "literal":
        decl.text = _unescape(p.take("string").text[1:-1])
    elif kind in ("span", "count"):
        t = p.peek()
        if t is None or t.kind not in ("cls", "char"):
            p.fail("expected character class")
        p.pos += 1
        decl.cls = t.text
        if kind == "span":
            mode = p.take("name").text
            if mode not in (GREEDY, ALL_LENGTHS):
                raise _Fail(lineno, t.col, f"span mode must be greedy or all, not {mode!r}")
            decl.mode = mode
        else:
            p.take(text="n")
            p.take(text="=")
            decl.count = p.fn_decl()
    else:
        raise _Fail(lineno, kind_tok.col, f"unknown lexer kind {kind!r}")
    p.take(text="out")
    decl.out = p.fn_decl()
    p.end()
    return decl


def _parse_rule(p: _Line) -> RuleDecl:
    lineno = p.lineno
    lhs = p.take("name").text
    p.take(text="->")
    rhs = []
    while p.peek() is not None and p.peek().kind == "name":
        rhs.append(p.take().text)
    p.take(text="{")
    fns = {}
    while True:
        t = p.take("name")
        if t.text == "out":
            slot = len(rhs) + 1
        else:
            m = _IN.match(t.text)
            if not m:
                raise _Fail(lineno, t.col, f"expected in<i> or out, found {t.text!r}")
            slot = int(m.group(1))
            if slot > len(rhs):
                raise _Fail(lineno, t.col, f"{t.text} but the rule has only {len(rhs)} symbols")
        if slot in fns:
            raise _Fail(lineno, t.col, f"{t.text} assigned twice")
        p.take(text="=")
        start_col = p.col()
        decl = p.fn_decl()
        _check_scope(decl, slot, lineno, start_col, "out" if slot == len(rhs) + 1 else f"in{slot}")
        fns[slot] = decl
        if p.accept("}"):
            break
        p.take(text=";")
    p.end()
    missing = [("out" if s == len(rhs) + 1 else f"in{s}") for s in range(1, len(rhs) + 2) if s not in fns]
    if missing:
        raise _Fail(lineno, 1, "missing " + ", ".join(missing))
    return RuleDecl(lhs, rhs, [fns[s] for s in range(1, len(rhs) + 2)], lineno)


def _variables(node, acc):
    if isinstance(node, Var):
        acc.append(node.name)
    elif isinstance(node, (BinOp, Cmp, BoolOp)):
        _variables(node.left, acc)
        _variables(node.right, acc)
    elif isinstance(node, (Neg, Not)):
        _variables(node.operand, acc)
    elif isinstance(node, Call):
        for a in node.args:
            _variables(a, acc)
    elif isinstance(node, FnDecl):
        _variables(node.expr, acc)
        if node.guard is not None:
            _variables(node.guard, acc)
    return acc


def rule_scope(slot: int) -> list:
    """Variable names visible to the function at 1-based position ``slot``."""
    names = ["a"]
    for m in range(1, slot):
        names += [f"a{m}", f"b{m}"]
    return names


def _check_scope(decl, slot, lineno, col, label):
    allowed = set(rule_scope(slot))
    for v in _variables(decl, []):
        if v not in allowed:
            raise _Fail(lineno, col, f"variable {v} out of scope for {label} (f{slot})")


def parse_doc(text: str) -> GrammarDoc:
    """Parse text into a GrammarDoc, collecting all diagnostics."""
    doc = GrammarDoc()
    diags = []
    selector_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        try:
            toks = _tokenize(raw, lineno)
            if not toks:
                continue
            p = _Line(toks, lineno)
            head = p.take("name")
            if head.text == "domain":
                if doc.domain is not None:
                    p.fail("domain declared twice")
                lo = p.signed_int()
                p.take(text="..")
                hi = p.signed_int()
                p.end()
                if lo > hi:
                    raise _Fail(lineno, head.col, f"empty domain {lo}..{hi}")
                doc.domain = (lo, hi)
            elif head.text == "start":
                if doc.start is not None:
                    p.fail("start declared twice")
                name = p.take("name").text
                doc.start = (name, p.signed_int())
                p.end()
            elif head.text == "selector":
                if selector_seen:
                    p.fail("selector declared twice")
                selector_seen = True
                kind = p.take("name").text
                if kind in ("all", "longest"):
                    doc.selector = (kind,)
                elif kind == "priority":
                    names = []
                    while p.peek() is not None:
                        names.append(p.take("name").text)
                    if not names:
                        p.fail("priority selector needs at least one terminal")
                    doc.selector = ("priority", *names)
                else:
                    raise _Fail(lineno, head.col, f"unknown selector {kind!r}")
                p.end()
            elif head.text == "terminal":
                doc.terminals.append(_parse_terminal(p))
            elif head.text == "rule":
                doc.rules.append(_parse_rule(p))
            else:
                raise _Fail(lineno, head.col, f"unknown declaration {head.text!r}")
        except _Fail as e:
            diags.append(e.diag)
    diags.extend(_check_doc(doc))
    if diags:
        raise DslError(diags)
    return doc


def _check_doc(doc: GrammarDoc) -> list:
    diags = []
    if doc.start is None:
        diags.append(Diagnostic(1, 1, "missing start declaration"))
    terms = {}
    for t in doc.terminals:
        if t.name in terms:
            diags.append(Diagnostic(t.line, 1, f"terminal {t.name} declared twice"))
        terms[t.name] = t
        for v in _variables(t.out, []):
            ok = ("a", "len") if t.kind in ("span", "count") else ("a",)
            if v not in ok:
                diags.append(Diagnostic(t.line, 1, f"variable {v} out of scope for terminal {t.name}"))
        if t.count is not None:
            for v in _variables(t.count, []):
                if v != "a":
                    diags.append(Diagnostic(t.line, 1, f"variable {v} out of scope for count of {t.name}"))
    nts = {r.lhs for r in doc.rules}
    for name in sorted(nts & set(terms)):
        diags.append(Diagnostic(1, 1, f"{name} is both a terminal and a nonterminal"))
    for r in doc.rules:
        for s in r.rhs:
            if s not in nts and s not in terms:
                diags.append(Diagnostic(r.line, 1, f"unknown symbol {s}"))
    if doc.start is not None:
        name, value = doc.start
        if name not in nts:
            diags.append(Diagnostic(1, 1, f"unknown start symbol {name}"))
        if doc.domain is not None and not doc.domain[0] <= value <= doc.domain[1]:
            diags.append(Diagnostic(1, 1, f"start parameter {value} outside domain"))
    if doc.selector[0] == "priority":
        for name in doc.selector[1:]:
            if name not in terms:
                diags.append(Diagnostic(1, 1, f"priority selector names unknown terminal {name}"))
    return diags


# -- compilation -----------------------------------------------------------

def _compile_expr(node, index):
    if isinstance(node, Num):
        v = node.value
        return lambda args: v
    if isinstance(node, Var):
        i = index[node.name]
        return lambda args: args[i]
    if isinstance(node, Neg):
        f = _compile_expr(node.operand, index)
        return lambda args: -f(args)
    if isinstance(node, BinOp):
        l, r = _compile_expr(node.left, index), _compile_expr(node.right, index)
        if node.op == "+":
            return lambda args: l(args) + r(args)
        if node.op == "-":
            return lambda args: l(args) - r(args)
        return lambda args: l(args) * r(args)
    if isinstance(node, Call):
        fs = [_compile_expr(a, index) for a in node.args]
        agg = min if node.fn == "min" else max
        return lambda args: agg(f(args) for f in fs)
    raise TypeError(node)


_CMP = {"<": lambda x, y: x < y, "<=": lambda x, y: x <= y, ">": lambda x, y: x > y,
        ">=": lambda x, y: x >= y, "==": lambda x, y: x == y, "!=": lambda x, y: x != y}


def _compile_guard(node, index):
    if node is None:
        return lambda args: True
    if isinstance(node, Cmp):
        l, r, op = _compile_expr(node.left, index), _compile_expr(node.right, index), _CMP[node.op]
        return lambda args: op(l(args), r(args))
    if isinstance(node, Not):
        g = _compile_guard(node.operand, index)
        return lambda args: not g(args)
    l, r = _compile_guard(node.left, index), _compile_guard(node.right, index)
    if node.op == "and":
        return lambda args: l(args) and r(args)
    return lambda args: l(args) or r(args)


def compile_fn(decl: FnDecl, names: list, domain: Optional[tuple], label: str = "fn") -> ParamFn:
    """Compile to a ParamFn over positional arguments named ``names``."""
    index = {n: i for i, n in enumerate(names)}
    value = _compile_expr(decl.expr, index)
    guard = _compile_guard(decl.guard, index)
    lo, hi = domain if domain is not None else (None, None)

    def run(*args):
        if not guard(args):
            return UNDEFINED
        v = value(args)
        if lo is not None and not lo <= v <= hi:
            return UNDEFINED
        return v

    return ParamFn(len(names), run, f"{label}: {format_fn(decl)}")


@dataclass
class Loaded:
    """A compiled grammar document."""

    doc: GrammarDoc
    grammar: Grammar
    lexer: LexerFn
    selector: SelectorFn

    @property
    def domain(self):
        return self.grammar.domain


def build(doc: GrammarDoc) -> Loaded:
    """Compile a checked document into engine objects."""
    diags = _check_doc(doc)
    if diags:
        raise DslError(diags)
    dom = doc.domain
    terms = {t.name: term(t.name) for t in doc.terminals}
    nts = {r.lhs: nt(r.lhs) for r in doc.rules}
    rules = []
    for n, rd in enumerate(doc.rules, start=1):
        rid = f"r{n}"
        k = len(rd.rhs)
        rhs = []
        for i, (name, fd) in enumerate(zip(rd.rhs, rd.fns), start=1):
            sym = terms.get(name) or nts[name]
            rhs.append((sym, compile_fn(fd, rule_scope(i), dom, f"{rid}.in{i}")))
        out = compile_fn(rd.fns[k], rule_scope(k + 1), dom, f"{rid}.out")
        rules.append(Rule(rid, nts[rd.lhs], tuple(rhs), out))
    table = {}
    for t in doc.terminals:
        sym = terms[t.name]
        if t.kind in ("char", "literal"):
            table[sym] = lexer_literal(t.text, compile_fn(t.out, ["a"], dom, f"{t.name}.out"))
        elif t.kind == "span":
            out = compile_fn(t.out, ["a", "len"], dom, f"{t.name}.out")
            table[sym] = lexer_charspan(parse_class(t.cls), t.mode, out)
        else:
            count = compile_fn(t.count, ["a"], None, f"{t.name}.n")
            out = compile_fn(t.out, ["a", "len"], dom, f"{t.name}.out")
            table[sym] = lexer_count(parse_class(t.cls), count, out)
    kind = doc.selector[0]
    if kind == "all":
        sel = selector_all()
    elif kind == "longest":
        sel = selector_longest()
    else:
        sel = selector_priority([terms[n] for n in doc.selector[1:]])
    start_name, start_param = doc.start
    domain = frozenset(range(dom[0], dom[1] + 1)) if dom is not None else None
    g = Grammar(frozenset(nts.values()), frozenset(terms.values()), tuple(rules),
                nts.get(start_name, nt(start_name)), start_param, frozenset(), domain)
    violations = validate_grammar(g)
    if violations:
        raise GrammarError(violations)
    return Loaded(doc, g, lexer_table(table), sel)


def parse_grammar_doc(text: str) -> Loaded:
    """Parse and compile a grammar document; raises DslError with diagnostics."""
    return build(parse_doc(text))


# -- pretty printing -------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2}


def format_expr(node, prec: int = 0) -> str:
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        inner = format_expr(node.operand, 3)
        return f"-{inner}"
    if isinstance(node, Call):
        return f"{node.fn}(" + ", ".join(format_expr(a) for a in node.args) + ")"
    p = _PREC[node.op]
    # left-associative: right operand needs parens at equal precedence
    s = f"{format_expr(node.left, p)} {node.op} {format_expr(node.right, p + 1)}"
    return f"({s})" if p < prec else s


def format_guard(node, prec: int = 0) -> str:
    if isinstance(node, Cmp):
        return f"{format_expr(node.left)} {node.op} {format_expr(node.right)}"
    if isinstance(node, Not):
        return f"not {format_guard(node.operand, 3)}"
    p = 1 if node.op == "or" else 2
    s = f"{format_guard(node.left, p)} {node.op} {format_guard(node.right, p + 1)}"
    return f"({s})" if p < prec else s


def format_fn(decl: FnDecl) -> str:
    s = format_expr(decl.expr)
    if decl.guard is not None:
        s += " when " + format_guard(decl.guard)
    return s


def _quote(text: str, q: str) -> str:
    return q + text.replace("\\", "\\\\").replace(q, "\\" + q).replace("\n", "\\n").replace("\t", "\\t") + q


def format_doc(doc: GrammarDoc) -> str:
    """Canonical text of a document; parsing it yields an equal document."""
    lines = []
    if doc.domain is not None:
        lines.append(f"domain {doc.domain[0]}..{doc.domain[1]}")
    if doc.start is not None:
        lines.append(f"start {doc.start[0]} {doc.start[1]}")
    lines.append("selector " + " ".join(doc.selector))
    for t in doc.terminals:
        if t.kind == "char":
            spec = "char " + _quote(t.text, "'")
        elif t.kind == "literal":
            spec = "literal " + _quote(t.text, '"')
        elif t.kind == "span":
            spec = f"span {t.cls} {t.mode}"
        else:
            spec = f"count {t.cls} n = {format_fn(t.count)}"
        lines.append(f"terminal {t.name} = {spec} out {format_fn(t.out)}")
    for r in doc.rules:
        k = len(r.rhs)
        parts = [f"in{i} = {format_fn(f)}" for i, f in enumerate(r.fns[:k], start=1)]
        parts.append(f"out = {format_fn(r.fns[k])}")
        head = " ".join([r.lhs, "->", *r.rhs])
        lines.append(f"rule {head} {{ " + " ; ".join(parts) + " }")
    return "\n".join(lines) + "\n"
