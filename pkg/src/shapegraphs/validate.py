"""Membership checking for typed graphs against shape graphs.

A node locally satisfies a type when its outgoing edges admit a witness
assignment: each edge gets one type carried by its target, and for every
(label, type) pair the number of edges so assigned falls inside the
schema arity.  Labels are independent, so the check decomposes into one
degree-constrained assignment problem per label, solved exactly either
by bounded exhaustive search or by a feasibility flow with lower bounds.

The typing of a whole graph is read as the greatest fixpoint of local
satisfaction: start from the full node-times-type relation and delete
unwitnessed pairs until stable.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .graphs import TypedGraph, Graph
from .intervals import INF, Multiplicity
from .schema import ShapeGraph

# Above this per-label out-degree the assignment check switches from
# exhaustive search to the feasibility flow.
EXHAUSTIVE_THRESHOLD = 8


@dataclass(frozen=True)
class Diagnostic:
    node: str
    type: Optional[str]
    label: Optional[str]
    reason: str

    def record(self) -> dict:
        return {
            "phase": "validate",
            "node": self.node,
            "type": self.type,
            "label": self.label,
            "reason": self.reason,
        }


@dataclass(frozen=True)
class Verdict:
    valid: bool
    diagnostics: tuple[Diagnostic, ...] = field(default=())

    def __post_init__(self) -> None:
        assert self.valid == (not self.diagnostics)

    def __bool__(self) -> bool:
        return self.valid


def _feasible_exhaustive(groups: list[tuple[frozenset[str], int]],
                         bounds: Mapping[str, Multiplicity]) -> bool:
    """Exact check by recursive enumeration over count splits per group."""
    lower_types = [s for s, m in bounds.items() if m.lo > 0]

    def rec(idx: int, counts: Counter) -> bool:
        if idx == len(groups):
            return all(counts[s] >= bounds[s].lo for s in lower_types)
        cands, n = groups[idx]
        cand_list = sorted(cands)
        # distribute n identical edges over the candidate types
        for split in _compositions(n, len(cand_list)):
            ok = True
            for s, k in zip(cand_list, split):
                if k and counts[s] + k > bounds[s].hi:
                    ok = False
                    break
            if not ok:
                continue
            for s, k in zip(cand_list, split):
                counts[s] += k
            if rec(idx + 1, counts):
                for s, k in zip(cand_list, split):
                    counts[s] -= k
                return True
            for s, k in zip(cand_list, split):
                counts[s] -= k
        return False

    return rec(0, Counter())


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class _Dinic:
    """Small max-flow engine for the feasibility reduction."""

    def __init__(self, n: int):
        self.n = n
        self.adj: list[list[int]] = [[] for _ in range(n)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add(self, u: int, v: int, cap: int) -> None:
        self.adj[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(cap)
        self.adj[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0)

    def max_flow(self, s: int, t: int) -> int:
        flow = 0
        while True:
            level = [-1] * self.n
            level[s] = 0
            queue = [s]
            for u in queue:
                for eid in self.adj[u]:
                    v = self.to[eid]
                    if self.cap[eid] > 0 and level[v] < 0:
                        level[v] = level[u] + 1
                        queue.append(v)
            if level[t] < 0:
                return flow
            it = [0] * self.n

            def dfs(u: int, pushed: int) -> int:
                if u == t:
                    return pushed
                while it[u] < len(self.adj[u]):
                    eid = self.adj[u][it[u]]
                    v = self.to[eid]
                    if self.cap[eid] > 0 and level[v] == level[u] + 1:
                        got = dfs(v, min(pushed, self.cap[eid]))
                        if got:
                            self.cap[eid] -= got
                            self.cap[eid ^ 1] += got
                            return got
                    it[u] += 1
                return 0

            while True:
                pushed = dfs(s, 1 << 60)
                if not pushed:
                    break
                flow += pushed


def _feasible_flow(groups: list[tuple[frozenset[str], int]],
                   bounds: Mapping[str, Multiplicity]) -> bool:
    """Exact check as a circulation with lower bounds on type quotas."""
    total = sum(n for _, n in groups)
    types = sorted(bounds)
    tindex = {s: i for i, s in enumerate(types)}
    # Nodes: source, groups, types, sink, then super source/sink.
    n_groups = len(groups)
    src = 0
    first_group = 1
    first_type = first_group + n_groups
    sink = first_type + len(types)
    ssrc, ssink = sink + 1, sink + 2
    net = _Dinic(sink + 3)
    demand = [0] * (sink + 1)
    # source -> group with lower = upper = group size (every edge assigned)
    for gi, (_, n) in enumerate(groups):
        demand[src] += n
        demand[first_group + gi] -= n
    for gi, (cands, n) in enumerate(groups):
        for s in cands:
            net.add(first_group + gi, first_type + tindex[s], n)
    for s in types:
        lo = bounds[s].lo
        hi = bounds[s].hi
        cap = total if hi == INF else int(hi)
        demand[first_type + tindex[s]] += lo
        demand[sink] -= lo
        if cap - lo > 0:
            net.add(first_type + tindex[s], sink, cap - lo)
    net.add(sink, src, total)  # close the circulation
    need = 0
    for v in range(sink + 1):
        if demand[v] < 0:
            net.add(ssrc, v, -demand[v])
            need += -demand[v]
        elif demand[v] > 0:
            net.add(v, ssink, demand[v])
    return net.max_flow(ssrc, ssink) == need


def label_assignment_feasible(
    target_typesets: Iterable[frozenset[str]],
    bounds: Mapping[str, Multiplicity],
    threshold: int = EXHAUSTIVE_THRESHOLD,
) -> bool:
    """Can the label's edges be assigned types within the given arity bounds?

    ``target_typesets`` holds, per edge, the candidate types of its target.
    ``bounds`` maps every type with a nonzero arity to that arity; types
    outside ``bounds`` are zero and must receive no edge.
    """
    edges = list(target_typesets)
    usable = []
    for cands in edges:
        cut = frozenset(s for s in cands if s in bounds)
        if not cut:
            return False  # this edge can only be assigned forbidden types
        usable.append(cut)
    if sum(m.lo for m in bounds.values()) > len(usable):
        return False
    grouped = Counter(usable)
    groups = sorted(grouped.items(), key=lambda kv: sorted(kv[0]))
    if len(usable) <= threshold:
        return _feasible_exhaustive(groups, bounds)
    return _feasible_flow(groups, bounds)


def witness_feasible(
    node: str,
    t: str,
    schema: ShapeGraph,
    typing: Mapping[str, frozenset[str]],
    graph: Graph,
    threshold: int = EXHAUSTIVE_THRESHOLD,
) -> bool:
    """Exact local satisfaction of type ``t`` at ``node``.

    Candidate types for each outgoing edge are drawn from ``typing`` at the
    edge target.  Labels with mandatory arities but no edges fail.
    """
    if node not in graph.nodes:
        raise KeyError(f"node {node!r} not in graph")
    return _failing_label(node, t, schema, typing, graph, threshold) is None


def _failing_label(
    node: str,
    t: str,
    schema: ShapeGraph,
    typing: Mapping[str, frozenset[str]],
    graph: Graph,
    threshold: int = EXHAUSTIVE_THRESHOLD,
) -> Optional[str]:
    """First label (sorted) whose assignment problem is infeasible, if any."""
    by_label: dict[str, list[frozenset[str]]] = {}
    for _, label, dst in graph.out(node):
        by_label.setdefault(label, []).append(typing[dst])
    labels = set(by_label)
    for (t0, label, s), mult in schema.arity_map.items():
        if t0 == t and mult.lo > 0:
            labels.add(label)
    for label in sorted(labels):
        bounds = {
            s: schema.arity(t, label, s)
            for s in schema.context_targets((t, label))
        }
        if not label_assignment_feasible(by_label.get(label, []), bounds, threshold):
            return label
    return None


def maximal_typing(
    graph: Graph,
    schema: ShapeGraph,
    threshold: int = EXHAUSTIVE_THRESHOLD,
) -> dict[str, frozenset[str]]:
    """Greatest fixpoint of local satisfaction, by worklist refinement.

    Starts from the full relation and deletes unwitnessed pairs until no
    deletion applies; the result does not depend on deletion order.
    """
    current: dict[str, set[str]] = {n: set(schema.types) for n in graph.nodes}
    preds: dict[str, set[str]] = {n: set() for n in graph.nodes}
    for src, _, dst in graph.edges:
        preds[dst].add(src)
    view = {n: frozenset(ts) for n, ts in current.items()}
    pending = {(n, t) for n in sorted(graph.nodes) for t in sorted(schema.types)}
    while pending:
        node, t = min(pending)
        pending.discard((node, t))
        if t not in current[node]:
            continue
        if witness_feasible(node, t, schema, view, graph, threshold):
            continue
        current[node].discard(t)
        view[node] = frozenset(current[node])
        for pred in preds[node]:
            for s in current[pred]:
                pending.add((pred, s))
    return {n: frozenset(ts) for n, ts in current.items()}


def check_membership(
    tg: TypedGraph,
    schema: ShapeGraph,
    mode: str = "witness",
    threshold: int = EXHAUSTIVE_THRESHOLD,
) -> Verdict:
    """Is the typed graph a member of the schema's language?

    ``witness`` mode accepts any proper typing in which every (node, type)
    pair is locally witnessed against the typing itself.  ``strict`` mode
    additionally requires the typing to equal the maximal typing.
    """
    if mode not in ("witness", "strict"):
        raise ValueError(f"unknown mode {mode!r}")
    diags: list[Diagnostic] = []
    for node in sorted(tg.graph.nodes):
        if not tg.typing[node]:
            diags.append(Diagnostic(node, None, None, "properness violated: no types"))
    if mode == "witness":
        for node in sorted(tg.graph.nodes):
            for t in sorted(tg.typing[node]):
                label = _failing_label(node, t, schema, tg.typing, tg.graph, threshold)
                if label is not None:
                    diags.append(Diagnostic(node, t, label, "no witness for label"))
    else:
        maximal = maximal_typing(tg.graph, schema, threshold)
        for node in sorted(tg.graph.nodes):
            missing = maximal[node] - tg.typing[node]
            extra = tg.typing[node] - maximal[node]
            for t in sorted(missing):
                diags.append(Diagnostic(node, t, None, "maximal typing has extra type"))
            for t in sorted(extra):
                diags.append(Diagnostic(node, t, None, "type not in maximal typing"))
    return Verdict(not diags, tuple(diags))
