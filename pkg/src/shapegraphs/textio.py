"""Line-oriented text formats for schemas and typed graphs.

Schema documents hold one definition per line::

    Bug -> descr::str, submittedBy::User, verifiedBy::Employee?, related::Bug*

A missing multiplicity suffix means exactly-one; absent triples mean zero.
Graph documents list typed nodes and edges::

    node b1 : Bug
    edge b1 related b4

``#`` starts a comment in both formats.  Parsing is order-insensitive and
printing normalizes (sorted definitions, sorted atoms) so that a
parse/print round trip is byte-stable.
"""

from __future__ import annotations

import re

from .graphs import Graph, TypedGraph
from .intervals import MULTIPLICITY_BY_SYMBOL, Multiplicity
from .schema import ShapeGraph


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


_NAME = r"[^\s,:#]+"  # node identifiers
_SNAME = r"[^\s,:#?*+]+"  # type and label names (no multiplicity symbols)
_ATOM_RE = re.compile(rf"^({_SNAME})::({_SNAME})([?*+])?$")


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0]


def parse_schema(text: str) -> ShapeGraph:
    arities: dict[tuple[str, str, str], Multiplicity] = {}
    declared: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if "->" not in line:
            raise ParseError("expected 'TYPE -> atoms'", lineno)
        head, _, body = line.partition("->")
        source = head.strip()
        if not source or not re.fullmatch(_SNAME, source):
            raise ParseError(f"bad type name {source!r}", lineno)
        declared.add(source)
        body = body.strip()
        if not body:
            continue
        for chunk in body.split(","):
            atom = chunk.strip()
            m = _ATOM_RE.match(atom)
            if not m:
                raise ParseError(
                    f"bad atom {atom!r} (expected LABEL::TYPE with optional ?, * or +)",
                    lineno,
                )
            label, target, suffix = m.groups()
            mult = MULTIPLICITY_BY_SYMBOL[suffix] if suffix else Multiplicity.ONE
            triple = (source, label, target)
            if triple in arities:
                raise ParseError(
                    f"duplicate atom {label}::{target} for type {source}", lineno
                )
            arities[triple] = mult
            declared.add(target)
    return ShapeGraph(arities, types=declared)


def format_schema(schema: ShapeGraph) -> str:
    lines = []
    by_source: dict[str, list[tuple[str, str, Multiplicity]]] = {
        t: [] for t in sorted(schema.types)
    }
    for (t, a, s), mult in schema.arity_map.items():
        by_source[t].append((a, s, mult))
    for source in sorted(by_source):
        atoms = []
        for label, target, mult in sorted(by_source[source]):
            suffix = "" if mult is Multiplicity.ONE else str(mult)
            atoms.append(f"{label}::{target}{suffix}")
        lines.append(f"{source} -> {', '.join(atoms)}".rstrip())
    return "\n".join(lines) + "\n"


def parse_typed_graph(text: str) -> TypedGraph:
    typing: dict[str, set[str]] = {}
    edges: list[tuple[str, str, str]] = []
    edge_lines: dict[tuple[str, str, str], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        parts = line.split(None, 1)
        kind = parts[0]
        rest = parts[1] if len(parts) > 1 else ""
        if kind == "node":
            m = re.match(rf"^({_NAME})\s*:\s*(.+)$", rest)
            if not m:
                raise ParseError("expected 'node ID : Type, ...'", lineno)
            node, typelist = m.groups()
            types = [t.strip() for t in typelist.split(",")]
            if any(not t or not re.fullmatch(_SNAME, t) for t in types):
                raise ParseError(f"bad type list for node {node!r}", lineno)
            if node in typing:
                raise ParseError(f"duplicate node line for {node!r}", lineno)
            typing[node] = set(types)
        elif kind == "edge":
            fields = rest.split()
            if len(fields) != 3:
                raise ParseError("expected 'edge SRC LABEL DST'", lineno)
            triple = tuple(fields)
            if triple in edge_lines:
                raise ParseError(
                    f"duplicate edge {' '.join(triple)}"
                    f" (first seen on line {edge_lines[triple]})",
                    lineno,
                )
            edge_lines[triple] = lineno
            edges.append(triple)  # type: ignore[arg-type]
        else:
            raise ParseError(f"unknown directive {kind!r}", lineno)
    for triple in edges:
        src, _, dst = triple
        for endpoint in (src, dst):
            if endpoint not in typing:
                raise ParseError(
                    f"edge endpoint {endpoint!r} has no node line", edge_lines[triple]
                )
    return TypedGraph(Graph(typing.keys(), edges), typing)


def format_typed_graph(tg: TypedGraph) -> str:
    lines = []
    for node in sorted(tg.graph.nodes):
        types = ", ".join(sorted(tg.typing[node]))
        lines.append(f"node {node} : {types}")
    for src, label, dst in sorted(tg.graph.edges):
        lines.append(f"edge {src} {label} {dst}")
    return "\n".join(lines) + "\n"
