"""Finite edge-labeled graphs and typed graphs.

Nodes are opaque strings, edges are ``(source, label, target)`` triples
forming a set (no parallel duplicates).  A typed graph attaches a typing
relation mapping each node to a set of type names; a typing is *proper*
when no node is left without a type.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Tuple

Edge = Tuple[str, str, str]


@dataclass(frozen=True)
class Graph:
    nodes: frozenset[str]
    edges: frozenset[Edge]

    def __init__(self, nodes: Iterable[str], edges: Iterable[Edge]) -> None:
        object.__setattr__(self, "nodes", frozenset(nodes))
        edge_list = list(edges)
        edge_set = frozenset(edge_list)
        if len(edge_set) != len(edge_list):
            dupes = sorted({e for e in edge_list if edge_list.count(e) > 1})
            raise ValueError(f"duplicate edge triples: {dupes}")
        object.__setattr__(self, "edges", edge_set)
        for src, _, dst in self.edges:
            if src not in self.nodes or dst not in self.nodes:
                raise ValueError(f"edge endpoint not in node set: {(src, dst)}")

    @cached_property
    def out_edges(self) -> Mapping[str, tuple[Edge, ...]]:
        index: dict[str, list[Edge]] = {n: [] for n in self.nodes}
        for edge in sorted(self.edges):
            index[edge[0]].append(edge)
        return {n: tuple(es) for n, es in index.items()}

    def out(self, node: str) -> tuple[Edge, ...]:
        return self.out_edges[node]

    @cached_property
    def labels(self) -> frozenset[str]:
        return frozenset(label for _, label, _ in self.edges)


@dataclass(frozen=True)
class TypedGraph:
    """A graph with a typing; properness is checked on demand, not at build time.

    Construction tolerates nodes with empty typesets so that membership
    checking can diagnose properness violations instead of refusing the
    value outright.
    """

    graph: Graph
    typing: Mapping[str, frozenset[str]] = field(compare=False)
    _typing_key: tuple = field(repr=False)

    def __init__(self, graph: Graph, typing: Mapping[str, Iterable[str]]) -> None:
        object.__setattr__(self, "graph", graph)
        frozen = {n: frozenset(ts) for n, ts in typing.items()}
        for node in frozen:
            if node not in graph.nodes:
                raise ValueError(f"typing mentions unknown node {node!r}")
        for node in graph.nodes:
            frozen.setdefault(node, frozenset())
        object.__setattr__(self, "typing", frozen)
        key = tuple(sorted((n, tuple(sorted(ts))) for n, ts in frozen.items()))
        object.__setattr__(self, "_typing_key", key)

    def typeset(self, node: str) -> frozenset[str]:
        return self.typing[node]

    @property
    def is_proper(self) -> bool:
        return all(self.typing[n] for n in self.graph.nodes)

    @cached_property
    def types(self) -> frozenset[str]:
        out: set[str] = set()
        for ts in self.typing.values():
            out |= ts
        return frozenset(out)

    def nodes_with_type(self, t: str) -> tuple[str, ...]:
        return tuple(sorted(n for n in self.graph.nodes if t in self.typing[n]))


def disjoint_union(left: TypedGraph, right: TypedGraph) -> TypedGraph:
    """Disjoint union; nodes are renamed apart with deterministic prefixes."""

    def rename(tg: TypedGraph, prefix: str) -> tuple[set[str], set[Edge], dict]:
        nodes = {f"{prefix}{n}" for n in tg.graph.nodes}
        edges = {(f"{prefix}{s}", a, f"{prefix}{d}") for s, a, d in tg.graph.edges}
        typing = {f"{prefix}{n}": ts for n, ts in tg.typing.items()}
        return nodes, edges, typing

    ln, le, lt = rename(left, "l.")
    rn, re_, rt = rename(right, "r.")
    return TypedGraph(Graph(ln | rn, le | re_), {**lt, **rt})
