"""Command-line front end.

Exit codes: 0 success (including UNSAT, FALSE and ABSENT answers), 1 parse
or usage error, 2 semantic error, 3 search budget exhausted, 4 the
resolution engines disagree (an internal bug).
"""
from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence, TextIO

from . import datalog
from .axioms import NON_THEOREMS, SCHEMAS, KindMismatch
from .core import Expr, Key, KeyUniverse, UNBOUNDED, World, components, format_keys, interpret
from .decision import Countermodel, ResourceLimit, Satisfiable, satisfiable, valid_check
from .decision.common import Budget
from .parser import ParseError, parse_expr, parse_formula, parse_lna, parse_world
from .resolver import ref2_all, ref2_trace
from .semantics import InconsistentAssignment, holds, is_consistent, minimal_assignment

EXIT_OK, EXIT_USAGE, EXIT_SEMANTIC, EXIT_BUDGET, EXIT_DISAGREE = 0, 1, 2, 3, 4


class SemanticError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 1 instead of argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str, stdin: TextIO) -> str:
    if path == "-":
        return stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise SemanticError(f"cannot read {path}: {exc.strerror}") from None


def _key_arg(text: str, what: str) -> Key:
    e = parse_expr(text)
    if not isinstance(e, Key):
        raise SemanticError(f"{what} must be a key such as #k, got {text!r}")
    return e


def _with_keys(w: World, k: Key, e: Expr) -> World:
    return w.with_keys([k, *(a for a in components(e) if isinstance(a, Key))])


def _resolve_engines(w: World, k: Key, e: Expr) -> dict[str, frozenset[Key]]:
    return {
        "ref2": lambda: ref2_all(k, w, e),
        "fixpoint": lambda: interpret(e, w, minimal_assignment(w), k),
        "datalog": lambda: _datalog_resolve(w, k, e),
    }


def _datalog_resolve(w: World, k: Key, e: Expr) -> frozenset[Key]:
    model = datalog.minimal_model(datalog.world_to_program(w))
    q = datalog.expr_to_query(e, datalog.Const(k), datalog.Var("Y"))
    return frozenset(row["Y"] for row in datalog.answer_query(model, q))


def cmd_resolve(args, out: TextIO, stdin: TextIO) -> int:
    k, e = _key_arg(args.viewpoint, "--as"), parse_expr(args.expr)
    w = _with_keys(parse_world(_read(args.world, stdin)), k, e)
    engines = _resolve_engines(w, k, e)
    names = list(engines) if args.engine == "all" else [args.engine]
    results = {name: engines[name]() for name in names}
    answers = set(results.values())
    if len(answers) > 1:
        for name, keys in results.items():
            print(f"{name}: {format_keys(keys)}", file=sys.stderr)
        print("error: resolution engines disagree", file=sys.stderr)
        return EXIT_DISAGREE
    print(format_keys(answers.pop()), file=out)
    return EXIT_OK


def cmd_trace(args, out: TextIO, stdin: TextIO) -> int:
    k, e = _key_arg(args.viewpoint, "--as"), parse_expr(args.expr)
    target = _key_arg(args.target, "--target")
    w = _with_keys(parse_world(_read(args.world, stdin)), k, e)
    tree = ref2_trace(k, w, e, target)
    print("ABSENT" if tree is None else tree.render(), file=out)
    return EXIT_OK


def cmd_check(args, out: TextIO, stdin: TextIO) -> int:
    k, f = _key_arg(args.viewpoint, "--as"), parse_formula(args.formula)
    w = parse_world(_read(args.world, stdin)).with_keys([k])
    if args.semantics == "open":
        if args.lna is None:
            raise SemanticError("--semantics open needs an assignment given with --lna")
        l = parse_lna(_read(args.lna, stdin))
        if not is_consistent(w, l):
            print("INCONSISTENT-LNA", file=out)
            return EXIT_SEMANTIC
    else:
        if args.lna is not None:
            raise SemanticError("--lna only applies to --semantics open")
        l = minimal_assignment(w)
    print("TRUE" if holds(w, l, k, f) else "FALSE", file=out)
    return EXIT_OK


def _universe(args) -> KeyUniverse:
    if args.keys:
        return KeyUniverse.finite(_key_arg(x, "--keys") for x in args.keys)
    return UNBOUNDED


def cmd_sat(args, out: TextIO, stdin: TextIO) -> int:
    f = parse_formula(args.formula)
    result = satisfiable(f, _universe(args), Budget(args.budget))
    if isinstance(result, Satisfiable):
        print("SAT", file=out)
        out.write(result.render())
    else:
        print("UNSAT", file=out)
    return EXIT_OK


def cmd_valid(args, out: TextIO, stdin: TextIO) -> int:
    f = parse_formula(args.formula)
    result = valid_check(f, _universe(args), Budget(args.budget))
    if isinstance(result, Countermodel):
        print("COUNTERMODEL", file=out)
        out.write(result.render())
    else:
        print("VALID", file=out)
    return EXIT_OK


def cmd_query(args, out: TextIO, stdin: TextIO) -> int:
    w = parse_world(_read(args.world, stdin))
    q = datalog.parse_query(args.q)
    model = datalog.minimal_model(datalog.world_to_program(w))
    try:
        rows = datalog.answer_query(model, q)
    except ValueError as exc:
        raise SemanticError(str(exc)) from None
    for row in rows:
        print("\t".join(f"{v}={row[v]}" for v in row), file=out)
    return EXIT_OK


def cmd_emit(args, out: TextIO, stdin: TextIO) -> int:
    w = parse_world(_read(args.world, stdin))
    out.write(datalog.emit_program(datalog.world_to_program(w)))
    return EXIT_OK


def cmd_list_schemas(args, out: TextIO, stdin: TextIO) -> int:
    for s in SCHEMAS.values():
        print(f"{s.name}\t{s.family}", file=out)
    for s in NON_THEOREMS.values():
        print(f"{s.name}\t{s.family}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="localnames", description="Resolve and reason about linked local names.")
    parser.add_argument("--list-schemas", action="store_true", help="list axiom schemas and exit")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def world_cmd(name: str, help: str):
        p = sub.add_parser(name, help=help)
        p.add_argument("world", help="world file, or - for stdin")
        return p

    p = world_cmd("resolve", "keys an expression denotes for a viewpoint")
    p.add_argument("--as", dest="viewpoint", required=True)
    p.add_argument("--expr", required=True)
    p.add_argument("--engine", choices=["all", "ref2", "fixpoint", "datalog"], default="all")
    p.set_defaults(run=cmd_resolve)

    p = world_cmd("trace", "a REF2 computation tree for one answer")
    p.add_argument("--as", dest="viewpoint", required=True)
    p.add_argument("--expr", required=True)
    p.add_argument("--target", required=True)
    p.set_defaults(run=cmd_trace)

    p = world_cmd("check", "model-check a formula")
    p.add_argument("--as", dest="viewpoint", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--semantics", choices=["closed", "open"], default="closed")
    p.add_argument("--lna", help="assignment file for the open semantics")
    p.set_defaults(run=cmd_check)

    for name, run, help in [
        ("sat", cmd_sat, "decide satisfiability"),
        ("valid", cmd_valid, "decide validity"),
    ]:
        p = sub.add_parser(name, help=help)
        p.add_argument("formula")
        scope = p.add_mutually_exclusive_group()
        scope.add_argument("--keys", nargs="+", metavar="KEY", help="finite key universe")
        scope.add_argument("--unbounded", action="store_true", help="unbounded key universe (default)")
        p.add_argument("--budget", type=int, default=None, help="node budget (default from NAMES_BUDGET or 10^7)")
        p.set_defaults(run=run)

    p = world_cmd("query", "answer a conjunctive query over the world's minimal model")
    p.add_argument("--q", required=True)
    p.set_defaults(run=cmd_query)

    p = world_cmd("emit-datalog", "print the world's logic program")
    p.set_defaults(run=cmd_emit)

    p = sub.add_parser("list-schemas", help="list axiom schemas")
    p.set_defaults(run=cmd_list_schemas)
    return parser


def main(argv: Optional[Sequence[str]] = None, stdin: Optional[TextIO] = None, out: Optional[TextIO] = None) -> int:
    stdin = stdin or sys.stdin
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.list_schemas:
        return cmd_list_schemas(args, out, stdin)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.run(args, out, stdin)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimit as exc:
        print("BUDGET-EXCEEDED", file=out)
        print(str(exc), file=sys.stderr)
        return EXIT_BUDGET
    except (SemanticError, KindMismatch, InconsistentAssignment, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC


if __name__ == "__main__":
    sys.exit(main())
