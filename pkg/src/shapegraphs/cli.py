"""Command line interface.

Exit codes: 0 for success (valid / equal), 1 for a negative verdict
(invalid / unequal), 2 for usage or parse errors.  Reports are emitted as
line-delimited JSON records with fields (phase, context, type, case,
value); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .analysis import TypesetFamily, realizable_typesets_bounded, typesets_of_graph
from .canon import canonize
from .chargen import characteristic, weakly_characteristic
from .learner import typed_learner
from .schema import ShapeGraph
from .textio import (
    ParseError,
    format_schema,
    format_typed_graph,
    parse_schema,
    parse_typed_graph,
)
from .validate import check_membership


class _UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as err:
        raise _UsageError(f"cannot read {path}: {err}") from err


def _write(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_order(spec: Optional[str], types: frozenset[str]) -> Optional[list[str]]:
    """An order file lists one type per line and must cover every type."""
    if spec in (None, "lex"):
        return None
    listed = [line.strip() for line in _read(spec).splitlines()]
    listed = [line for line in listed if line and not line.startswith("#")]
    missing = sorted(types - set(listed))
    if missing:
        raise _UsageError(f"order file {spec} does not list types: {missing}")
    return listed


def _load_family(args, schema: Optional[ShapeGraph]) -> TypesetFamily:
    if args.typesets_from:
        return typesets_of_graph(parse_typed_graph(_read(args.typesets_from)))
    if schema is None:
        raise _UsageError("--search-depth requires a schema")
    return realizable_typesets_bounded(schema, args.search_depth)


def _cmd_infer(args) -> int:
    tg = parse_typed_graph(_read(args.graph))
    order = _load_order(args.order, tg.types)
    report = typed_learner(tg, order)
    _write(args.output, format_schema(report.schema))
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            for record in report.records():
                fh.write(json.dumps(record, sort_keys=True) + "\n")
    return 0


def _cmd_validate(args) -> int:
    tg = parse_typed_graph(_read(args.graph))
    schema = parse_schema(_read(args.schema))
    verdict = check_membership(tg, schema, args.mode)
    for diag in verdict.diagnostics:
        print(json.dumps(diag.record(), sort_keys=True), file=sys.stderr)
    return 0 if verdict.valid else 1


def _cmd_canonize(args) -> int:
    schema = parse_schema(_read(args.schema))
    family = _load_family(args, schema)
    order = _load_order(args.order, schema.types)
    result, trace = canonize(schema, family, order)
    _write(args.output, format_schema(result))
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            for app in trace:
                fh.write(json.dumps(app.record(), sort_keys=True) + "\n")
    return 0


def _cmd_chargen(args) -> int:
    schema = parse_schema(_read(args.schema))
    family = _load_family(args, schema)
    build = characteristic if args.characteristic else weakly_characteristic
    tg = build(schema, family)
    _write(args.output, format_typed_graph(tg))
    return 0


def _cmd_eq(args) -> int:
    left = parse_schema(_read(args.left))
    right = parse_schema(_read(args.right))
    family = _load_family(args, left)
    order_types = left.types | right.types
    order = _load_order(args.order, order_types)
    if order is None:
        order = sorted(order_types)
    canon_left, _ = canonize(left, family, order)
    canon_right, _ = canonize(right, family, order)
    return 0 if canon_left == canon_right else 1


def _family_options(sub) -> None:
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument(
        "--typesets-from", metavar="GRAPH", help="typed graph supplying the typesets"
    )
    group.add_argument(
        "--search-depth",
        type=int,
        metavar="N",
        help="bounded search budget for realizable typesets",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shapegraphs",
        description="Validate, canonize and infer shape-graph schemas.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("infer", help="infer a schema from a typed graph")
    sub.add_argument("-g", "--graph", required=True)
    sub.add_argument("--order", default="lex", help="'lex' or a type order file")
    sub.add_argument("-o", "--output")
    sub.add_argument("--report", help="write derivation records (JSON lines)")
    sub.set_defaults(func=_cmd_infer)

    sub = subs.add_parser("validate", help="check a typed graph against a schema")
    sub.add_argument("-g", "--graph", required=True)
    sub.add_argument("-s", "--schema", required=True)
    sub.add_argument("--mode", choices=("witness", "strict"), default="witness")
    sub.set_defaults(func=_cmd_validate)

    sub = subs.add_parser("canonize", help="canonize a schema")
    sub.add_argument("-s", "--schema", required=True)
    _family_options(sub)
    sub.add_argument("--order", default="lex")
    sub.add_argument("-o", "--output")
    sub.add_argument("--report", help="write applied-rule records (JSON lines)")
    sub.set_defaults(func=_cmd_canonize)

    sub = subs.add_parser("chargen", help="generate a characteristic typed graph")
    sub.add_argument("-s", "--schema", required=True)
    _family_options(sub)
    sub.add_argument("--characteristic", action="store_true",
                     help="add pair witnesses for obfuscated types")
    sub.add_argument("-o", "--output")
    sub.set_defaults(func=_cmd_chargen)

    sub = subs.add_parser("eq", help="compare canonical forms of two schemas")
    sub.add_argument("-a", "--left", required=True)
    sub.add_argument("-b", "--right", required=True)
    _family_options(sub)
    sub.add_argument("--order", default="lex")
    sub.set_defaults(func=_cmd_eq)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return int(exit_.code or 0)
    try:
        return args.func(args)
    except (_UsageError, ParseError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
