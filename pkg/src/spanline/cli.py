"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 invalid input, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import autops
from .autops import VA, InvariantError, StateLimitExceeded
from .domination import load_rule, validate_rule
from .evaluation import evaluate
from .genbench import Cnf, sat_to_skyline
from .nrobp import check_read_once, count_models, to_nrobp
from .regex import compile as compile_formula
from .skyline import analyze_rule, skyline_compiled, skyline_direct
from .spancore import sorted_lines

EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- input helpers --------------------------------------------------------------


def _looks_like_va(arg: str) -> bool:
    if arg.endswith(".json"):
        return True
    path = Path(arg)
    try:
        return path.is_file() and path.read_text(encoding="utf-8").lstrip().startswith("{")
    except (OSError, UnicodeDecodeError):
        return False


def load_automaton(arg: str, force: str | None = None, alphabet=None) -> VA:
    """A VA file or a formula, sniffed by extension and content unless forced."""
    if force == "va" or (force is None and _looks_like_va(arg)):
        return VA.loads(Path(arg).read_text(encoding="utf-8"))
    return compile_formula(arg, alphabet)


def read_document(args) -> str:
    if args.doc is not None:
        return args.doc
    if args.docfile is None:
        raise UsageError("a document is required: give a file or --doc STR")
    text = Path(args.docfile).read_text(encoding="utf-8")
    return text[:-1] if text.endswith("\n") else text


def _source(args) -> VA:
    force = "regex" if args.regex else "va" if args.va else None
    alphabet = list(args.alphabet) if args.alphabet else None
    return load_automaton(args.source, force, alphabet)


def _rule_alphabet(*parts) -> set[str]:
    letters: set[str] = set()
    for p in parts:
        letters |= set(p)
    return letters or {"a", "b"}


def _emit(out, text: str) -> None:
    out.write(text if text.endswith("\n") else text + "\n")


def _dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=False)


# -- subcommands ------------------------------------------------------------------


def cmd_compile(args, out) -> int:
    alphabet = list(args.alphabet) if args.alphabet else None
    A = compile_formula(args.formula, alphabet)
    if args.output:
        Path(args.output).write_text(A.dumps() + "\n", encoding="utf-8")
    else:
        _emit(out, A.dumps())
    return 0


def cmd_eval(args, out) -> int:
    text = read_document(args)
    A = _source(args)
    for line in sorted_lines(evaluate(A, text), A.variables):
        _emit(out, line)
    return 0


def _load_manifest(path: str) -> tuple[VA, str, str]:
    manifest = json.loads(Path(path).read_text(encoding="utf-8"))
    va = manifest["va"]
    if isinstance(va, str):
        A = VA.loads((Path(path).parent / va).read_text(encoding="utf-8"))
    else:
        A = VA.from_json(va)
    return A, manifest["document"], manifest["rule"]


def cmd_skyline(args, out) -> int:
    if args.manifest:
        A, text, rule_name = _load_manifest(args.manifest)
        rule_name = args.rule or rule_name
    else:
        if args.source is None:
            raise UsageError("skyline needs an automaton, a formula or --manifest")
        text = read_document(args)
        A = _source(args)
        rule_name = args.rule
    if rule_name is None:
        raise UsageError("--rule is required")
    rule = load_rule(rule_name, _rule_alphabet(text, A.alphabet))
    started = time.perf_counter()
    stats = {"mode": args.mode, "rule": rule_name}
    if args.mode == "compiled":
        S = skyline_compiled(A, rule)
        result = evaluate(S, text)
        stats["va_states"] = S.n_states
        stats["va_transitions"] = len(S.transitions)
    else:
        result = skyline_direct(A, text, rule, threads=args.threads)
    stats["input_count"] = len(evaluate(A, text))
    stats["output_count"] = len(result)
    stats["seconds"] = round(time.perf_counter() - started, 6)
    for line in sorted_lines(result, A.variables):
        _emit(out, line)
    if args.stats:
        _emit(sys.stderr, json.dumps(stats, ensure_ascii=False))
    return 0


def cmd_analyze_rule(args, out) -> int:
    text = read_document(args)
    rule = load_rule(args.rule, _rule_alphabet(text))
    _emit(out, _dump(analyze_rule(rule, text).to_json()))
    return 0


def cmd_validate_rule(args, out) -> int:
    text = read_document(args)
    rule = load_rule(args.rule, _rule_alphabet(text))
    variables = args.vars.split(",") if args.vars else None
    report = validate_rule(rule, text, variables, mode=args.mode)
    _emit(out, _dump(report.to_json()))
    return 0 if report.ok else EXIT_INPUT


def cmd_nrobp(args, out) -> int:
    text = read_document(args)
    A = _source(args)
    p = to_nrobp(A, text)
    summary = {
        "nodes": p.n_nodes,
        "edges": len(p.edges),
        "variables": sorted(p.variables),
        "read_once": check_read_once(p),
    }
    if args.count:
        summary["models"] = count_models(p)
    if args.dot == "-":
        out.write(p.to_dot())
        return 0
    if args.dot:
        Path(args.dot).write_text(p.to_dot(), encoding="utf-8")
    _emit(out, _dump(summary))
    return 0


def cmd_reduce(args, out) -> int:
    F = Cnf.from_dimacs(Path(args.cnf).read_text(encoding="utf-8"))
    A, d, threshold = sat_to_skyline(F)
    manifest = {"va": None, "document": d.text, "threshold": threshold, "rule": "varinc"}
    if args.output:
        prefix = Path(args.output)
        va_path = prefix.with_name(prefix.name + ".va.json")
        va_path.write_text(A.dumps() + "\n", encoding="utf-8")
        manifest["va"] = va_path.name
        prefix.with_name(prefix.name + ".manifest.json").write_text(_dump(manifest) + "\n", encoding="utf-8")
    else:
        manifest["va"] = A.to_json()
        _emit(out, _dump(manifest))
    return 0


VA_BINARY = {
    "union": autops.union,
    "concat": autops.concat,
    "product": autops.cartesian_product,
    "join": autops.join,
    "intersection": autops.intersection,
    "difference": autops.difference,
}
VA_UNARY = {
    "normalize": autops.normalize,
    "trim": autops.trim,
    "order": autops.order_markers,
}


def cmd_va(args, out) -> int:
    A = load_automaton(args.a, "va")
    if args.op in VA_BINARY:
        if args.b is None:
            raise UsageError(f"va {args.op} needs two automata")
        result = VA_BINARY[args.op](A, load_automaton(args.b, "va"))
    elif args.op == "project":
        if args.keep is None:
            raise UsageError("va project needs --keep")
        result = autops.project(A, [v for v in args.keep.split(",") if v])
    elif args.op == "stats":
        _emit(out, _dump(A.stats()))
        return 0
    else:
        result = VA_UNARY[args.op](A)
    if args.output:
        Path(args.output).write_text(result.dumps() + "\n", encoding="utf-8")
    else:
        _emit(out, result.dumps())
    return 0


# -- parser ------------------------------------------------------------------------------


def _add_source(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("source", nargs=None if required else "?", help="formula or VA JSON file")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--regex", action="store_true", help="treat SOURCE as a formula")
    g.add_argument("--va", action="store_true", help="treat SOURCE as a VA JSON file")
    p.add_argument("--alphabet", help="extra letters for formula compilation")


def _add_doc(p: argparse.ArgumentParser) -> None:
    p.add_argument("docfile", nargs="?", help="file holding the document")
    p.add_argument("--doc", help="document given inline")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spanline", description="Document spanners with skyline queries.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compile", help="compile a formula to VA JSON")
    p.add_argument("formula")
    p.add_argument("-o", "--output")
    p.add_argument("--alphabet")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("eval", help="print the mappings of a spanner on a document")
    _add_source(p)
    _add_doc(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("skyline", help="print the maximal mappings under a rule")
    _add_source(p, required=False)
    _add_doc(p)
    p.add_argument("--rule", help="self|varinc|spaninc|ltr|spanlen|file:PATH")
    p.add_argument("--mode", choices=["direct", "compiled"], default="direct")
    p.add_argument("--stats", action="store_true", help="print a JSON stats block to stderr")
    p.add_argument("--manifest", help="manifest written by 'reduce sat-skyline'")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_skyline)

    p = sub.add_parser("analyze-rule", help="strict domination pairs of a single-variable rule")
    p.add_argument("rule")
    _add_doc(p)
    p.set_defaults(func=cmd_analyze_rule)

    p = sub.add_parser("validate-rule", help="check that a rule is a partial order on a document")
    p.add_argument("rule")
    _add_doc(p)
    p.add_argument("--vars", help="comma-separated variables to check (default x)")
    p.add_argument("--mode", choices=["exhaustive", "relation"], default="exhaustive")
    p.set_defaults(func=cmd_validate_rule)

    p = sub.add_parser("nrobp", help="build the read-once branching program of a spanner on a document")
    _add_source(p)
    _add_doc(p)
    p.add_argument("--dot", help="write DOT to this file ('-' for stdout)")
    p.add_argument("--count", action="store_true", help="also count models")
    p.set_defaults(func=cmd_nrobp)

    p = sub.add_parser("reduce", help="generate reduction instances")
    rsub = p.add_subparsers(dest="reduction", required=True, parser_class=_Parser)
    r = rsub.add_parser("sat-skyline", help="satisfiability to skyline size")
    r.add_argument("cnf", help="DIMACS file")
    r.add_argument("-o", "--output", help="prefix for PREFIX.va.json and PREFIX.manifest.json")
    r.set_defaults(func=cmd_reduce)

    p = sub.add_parser("va", help="automaton algebra on VA JSON files")
    p.add_argument("op", choices=[*VA_BINARY, *VA_UNARY, "project", "stats"])
    p.add_argument("a")
    p.add_argument("b", nargs="?")
    p.add_argument("--keep", help="comma-separated variables kept by project")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_va)
    return parser


def run(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"spanline: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantError as exc:
        print(f"spanline: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ValueError, KeyError, OSError, StateLimitExceeded) as exc:
        print(f"spanline: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main(argv: list[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
