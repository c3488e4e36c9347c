"""Command-line driver: ``pll parse | induce | diff | fuzz``.

Exit codes: 0 accept/ok, 1 reject, 2 usage or grammar diagnostics,
3 engine or contract error, 4 differential mismatch.
"""
from __future__ import annotations

import argparse
import json
import sys

from .dsl import parse_grammar_doc
from .ella import ella_run
from .errors import DslError, GrammarError, PllError
from .grammar import sorted_params
from .harness import FuzzBounds, Oracle, diff_grammar, fuzz
from .induced import EllaItem, induce_grammar
from .pella import item_to_json, pella_outputs, pella_run

EXIT_ACCEPT, EXIT_REJECT, EXIT_USAGE, EXIT_ENGINE, EXIT_MISMATCH = 0, 1, 2, 3, 4


class _Usage(Exception):
    pass


def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise _Usage(f"cannot read grammar: {e}")
    try:
        return parse_grammar_doc(text)
    except DslError as e:
        raise _Usage("\n".join(f"{path}:{d}" for d in e.diagnostics))
    except GrammarError as e:
        raise _Usage(f"{path}: {e}")


def cmd_parse(args, out) -> int:
    loaded = _load(args.grammar)
    if args.text is not None:
        text = args.text
    else:
        try:
            with open(args.input, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise _Usage(f"cannot read input: {e}")
    chart = pella_run(loaded.grammar, loaded.lexer, loaded.selector, text, verify=args.verify)
    outputs = sorted_params(pella_outputs(chart, loaded.grammar))
    accepted = bool(outputs)
    if args.json:
        doc = {"accepted": accepted, "outputs": outputs,
               "stats": {"items": chart.stats["items"], "positions": chart.stats["positions"]}}
        if args.dump_chart:
            doc["chart"] = [item_to_json(x) for x in chart.sorted_items()]
        out.write(json.dumps(doc, sort_keys=True) + "\n")
    else:
        out.write(("accepted" if accepted else "rejected") + "\n")
        out.write("outputs: " + " ".join(map(str, outputs)) + "\n")
        if args.dump_chart:
            for x in chart.sorted_items():
                out.write(f"{x!r}\n")
    return EXIT_ACCEPT if accepted else EXIT_REJECT


def cmd_induce(args, out) -> int:
    loaded = _load(args.grammar)
    if loaded.domain is None:
        raise _Usage("refusing to induce: the grammar declares no finite domain")
    for line in induce_grammar(loaded.grammar).listing():
        out.write(line + "\n")
    return EXIT_ACCEPT


def _dump_failure(loaded, text, out) -> None:
    chart = pella_run(loaded.grammar, loaded.lexer, loaded.selector, text)
    oracle = Oracle(loaded)
    echart = ella_run(oracle.grammar, oracle.lexer, oracle.selector, text)
    out.write("engine chart:\n")
    for x in chart.sorted_items():
        out.write(f"  {x!r}\n")
    out.write("oracle chart:\n")
    for y in sorted(echart.items, key=EllaItem.key):
        out.write(f"  {y!r}\n")


def cmd_diff(args, out) -> int:
    loaded = _load(args.grammar)
    if loaded.domain is None:
        raise _Usage("diff needs a finite domain declaration")
    if args.max_len < 0:
        raise _Usage("--max-len must be non-negative")
    rep = diff_grammar(loaded, args.max_len, args.alphabet, deep=args.deep, verify=args.verify)
    out.write(rep.summary() + "\n")
    if rep.ok:
        return EXIT_ACCEPT
    _dump_failure(loaded, rep.failure.text, out)
    return EXIT_MISMATCH


def cmd_fuzz(args, out) -> int:
    if args.count < 0 or args.max_len < 0:
        raise _Usage("--count and --max-len must be non-negative")
    bounds = FuzzBounds(args.max_nonterminals, args.max_terminals, args.max_rules, args.max_rhs,
                        args.max_domain, args.alphabet)
    rep = fuzz(args.seed, args.count, bounds, max_len=args.max_len, deep=args.deep, verify=args.verify)
    out.write(rep.summary() + "\n")
    return EXIT_ACCEPT if rep.ok else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pll", description="Parameterized local lexing recognizer.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="recognize an input and print its outputs")
    p.add_argument("--grammar", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--text")
    src.add_argument("--input")
    p.add_argument("--json", action="store_true")
    p.add_argument("--dump-chart", action="store_true")
    p.add_argument("--verify", action="store_true", help="check parameter chains and closures at runtime")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("induce", help="print the induced context-free grammar")
    p.add_argument("--grammar", required=True)
    p.set_defaults(func=cmd_induce)

    p = sub.add_parser("diff", help="compare against the induced-grammar oracle")
    p.add_argument("--grammar", required=True)
    p.add_argument("--max-len", type=int, required=True)
    p.add_argument("--alphabet", required=True)
    p.add_argument("--deep", action="store_true", help="also compare every chart checkpoint")
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("fuzz", help="diff random grammars")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--max-len", type=int, default=4)
    p.add_argument("--alphabet", default="ab")
    p.add_argument("--max-nonterminals", type=int, default=4)
    p.add_argument("--max-terminals", type=int, default=3)
    p.add_argument("--max-rules", type=int, default=6)
    p.add_argument("--max-rhs", type=int, default=3)
    p.add_argument("--max-domain", type=int, default=4)
    p.add_argument("--deep", action="store_true")
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_fuzz)
    return ap


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_ACCEPT
    try:
        return args.func(args, out)
    except _Usage as e:
        err.write(f"pll: {e}\n")
        return EXIT_USAGE
    except PllError as e:
        err.write(f"pll: {type(e).__name__}: {e}\n")
        return EXIT_ENGINE


if __name__ == "__main__":
    sys.exit(main())
