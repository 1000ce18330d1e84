"""Typeset extraction and per-context occurrence statistics.

The inference pipeline never inspects node identities: everything it
needs is which exact typesets occur, how typesets include one another,
and how many edges of each label point from carriers of one type toward
targets of a given typeset.  Statistics are kept as exact intervals;
clipping to a basic multiplicity happens only when arities are emitted,
because several inference tests compare raw counts against thresholds
that clipping would destroy.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence, Union

from .graphs import TypedGraph
from .intervals import INF, Interval, Multiplicity
from .schema import Context, ShapeGraph
from .validate import label_assignment_feasible

Typeset = frozenset[str]


class ContextUnobservedError(ValueError):
    pass


@dataclass(frozen=True)
class TypesetFamily:
    members: frozenset[Typeset]
    provenance: str = "explicit"

    def __post_init__(self) -> None:
        for member in self.members:
            if not member:
                raise ValueError("typeset family members must be nonempty")

    @classmethod
    def of(cls, members: Iterable[Iterable[str]], provenance: str = "explicit"):
        return cls(frozenset(frozenset(m) for m in members), provenance)

    @property
    def types(self) -> frozenset[str]:
        out: set[str] = set()
        for member in self.members:
            out |= member
        return frozenset(out)

    def containing(self, t: str) -> tuple[Typeset, ...]:
        return tuple(sorted((m for m in self.members if t in m), key=sorted))

    def sorted_members(self) -> tuple[Typeset, ...]:
        return tuple(sorted(self.members, key=sorted))

    def __iter__(self):
        return iter(self.sorted_members())

    def __contains__(self, member) -> bool:
        return frozenset(member) in self.members


def typesets_of_graph(tg: TypedGraph) -> TypesetFamily:
    if not tg.is_proper:
        raise ValueError("typed graph is not proper: some node has no types")
    return TypesetFamily(
        frozenset(tg.typing[n] for n in tg.graph.nodes), provenance="from-graph"
    )


@dataclass(frozen=True)
class InclusionRelation:
    """Preorder derived from a family: t is below s when every member
    containing t also contains s."""

    pairs: frozenset[tuple[str, str]]
    domain: frozenset[str]

    def subseteq(self, t: str, s: str) -> bool:
        return (t, s) in self.pairs

    def strict(self, t: str, s: str) -> bool:
        return (t, s) in self.pairs and (s, t) not in self.pairs

    def equivalent(self, t: str, s: str) -> bool:
        return (t, s) in self.pairs and (s, t) in self.pairs

    def equivalence_class(self, t: str) -> frozenset[str]:
        return frozenset(s for s in self.domain if self.equivalent(t, s))

    def subtypes(self, t: str) -> tuple[str, ...]:
        return tuple(sorted(s for s in self.domain if self.subseteq(s, t)))


def derive_inclusion(family: TypesetFamily) -> InclusionRelation:
    types = sorted(family.types)
    membership = {t: family.containing(t) for t in types}
    pairs = set()
    for t in types:
        for s in types:
            if all(s in member for member in membership[t]):
                pairs.add((t, s))
    return InclusionRelation(frozenset(pairs), frozenset(types))


def linearize(
    incl: InclusionRelation, base: Optional[Sequence[str]] = None
) -> tuple[str, ...]:
    """Total order extending strict inclusion; ties broken by the base order.

    The base order defaults to lexicographic and must cover the domain.
    Kahn-style construction: repeatedly emit the base-least type whose
    strict subtypes have all been emitted.
    """
    domain = sorted(incl.domain)
    if base is None:
        base = domain
    base_index = {t: i for i, t in enumerate(base)}
    missing = [t for t in domain if t not in base_index]
    if missing:
        raise ValueError(f"base order does not cover types: {missing}")
    emitted: list[str] = []
    placed: set[str] = set()
    remaining = set(domain)
    while remaining:
        ready = [
            t
            for t in remaining
            if all(
                s in placed or s == t or not incl.strict(s, t)
                for s in domain
            )
        ]
        if not ready:  # impossible: strict inclusion is acyclic
            raise AssertionError("cycle in strict inclusion")
        pick = min(ready, key=lambda t: base_index[t])
        emitted.append(pick)
        placed.add(pick)
        remaining.discard(pick)
    return tuple(emitted)


TargetSpec = Union[str, Typeset, Iterable[Typeset]]


class ContextStats:
    """Per-context occurrence counts over a typed graph.

    For a context ``(t, a)`` the sample set is one count per node carrying
    ``t`` (one sample per node regardless of how many other types it has).
    Counts toward a typeset are counts of ``a``-edges whose target carries
    exactly that typeset; counts toward a family or a single type aggregate
    pointwise over the same node order.
    """

    def __init__(self, tg: TypedGraph, context: Context):
        self.context = context
        t, label = context
        carriers = tg.nodes_with_type(t)
        if not carriers:
            raise ContextUnobservedError(
                f"context unobserved: no node carries type {t!r}"
            )
        self.carriers = carriers
        self._per_node: list[Counter] = []
        for node in carriers:
            counts: Counter = Counter()
            for _, a, dst in tg.graph.out(node):
                if a == label:
                    counts[tg.typing[dst]] += 1
            self._per_node.append(counts)
        self.observed_typesets: tuple[Typeset, ...] = tuple(
            sorted({ts for c in self._per_node for ts in c}, key=sorted)
        )

    def counts_for_typeset(self, typeset: Iterable[str]) -> tuple[int, ...]:
        key = frozenset(typeset)
        return tuple(c[key] for c in self._per_node)

    def counts_for_family(self, typesets: Iterable[Iterable[str]]) -> tuple[int, ...]:
        keys = {frozenset(ts) for ts in typesets}
        return tuple(sum(c[k] for k in keys) for c in self._per_node)

    def counts_for_type(self, t: str) -> tuple[int, ...]:
        return tuple(
            sum(n for ts, n in c.items() if t in ts) for c in self._per_node
        )

    def counts(self, target: TargetSpec) -> tuple[int, ...]:
        if isinstance(target, str):
            return self.counts_for_type(target)
        target = list(target)  # type: ignore[arg-type]
        if target and not isinstance(next(iter(target)), str):
            return self.counts_for_family(target)
        return self.counts_for_typeset(target)

    def occur_exact(self, target: TargetSpec) -> Interval:
        return Interval.fit(self.counts(target))

    def occur_basic(self, target: TargetSpec) -> Multiplicity:
        return Multiplicity.containing(self.occur_exact(target))

    def minoccur(self, target: TargetSpec) -> int:
        return self.occur_exact(target).lo

    def maxoccur(self, target: TargetSpec) -> int:
        hi = self.occur_exact(target).hi
        assert hi != INF
        return int(hi)


def occur(
    tg: TypedGraph, context: Context, target: TargetSpec
) -> tuple[Interval, Multiplicity]:
    """Exact and basic occurrence interval for a typeset, family, or type."""
    stats = ContextStats(tg, context)
    exact = stats.occur_exact(target)
    return exact, Multiplicity.containing(exact)


def characterizing_typeset(
    t: str,
    context: Optional[Context],
    family: TypesetFamily,
    incl: InclusionRelation,
) -> Optional[Typeset]:
    """A member containing ``t`` and otherwise only its supertypes.

    Deterministic choice: smallest such member, ties by sorted-name order.
    The context does not enter the definition; it is accepted for signature
    symmetry with the per-context inference steps.
    """
    candidates = [
        member
        for member in family.containing(t)
        if all(incl.subseteq(t, s) for s in member)
    ]
    if not candidates:
        return None
    return min(candidates, key=lambda m: (len(m), sorted(m)))


def is_obfuscated(
    t: str,
    context: Optional[Context],
    family: TypesetFamily,
    incl: InclusionRelation,
) -> bool:
    return characterizing_typeset(t, context, family, incl) is None


def cover_sets(
    t: str,
    family: TypesetFamily,
    finite: Mapping[str, bool],
) -> tuple[Typeset, ...]:
    """Members containing ``t`` whose other members all count as finite.

    ``finite`` supplies the per-type finiteness judgement; the caller decides
    how to treat types whose maximum arity is not yet known.
    """
    out = [
        member
        for member in family.containing(t)
        if all(finite.get(s, False) for s in member if s != t)
    ]
    return tuple(sorted(out, key=sorted))


def _label_profile_feasible(
    schema: ShapeGraph,
    t: str,
    label: str,
    vector: Mapping[Typeset, int],
) -> bool:
    """Would a node with the given per-typeset out-counts satisfy ``t`` on ``label``?"""
    bounds = {s: schema.arity(t, label, s) for s in schema.context_targets((t, label))}
    targets: list[Typeset] = []
    for typeset, n in vector.items():
        targets.extend([typeset] * n)
    return label_assignment_feasible(targets, bounds)


def profile_feasible(
    schema: ShapeGraph,
    types: Iterable[str],
    vectors: Mapping[str, Mapping[Typeset, int]],
) -> bool:
    """Feasibility of one out-edge profile for every type simultaneously.

    ``vectors`` maps labels to per-target-typeset counts.  Labels absent
    from the mapping are taken as zero.
    """
    labels = set(vectors)
    for t in types:
        for (t0, a, _), mult in schema.arity_map.items():
            if t0 == t and mult.lo > 0:
                labels.add(a)
    for t in types:
        for a in sorted(labels):
            if not _label_profile_feasible(schema, t, a, vectors.get(a, {})):
                return False
    return True


def _vectors(targets: Sequence[Typeset], coord_cap: int, total_cap: int):
    """All count vectors over ``targets`` within per-coordinate and total caps."""

    def rec(idx: int, budget: int):
        if idx == len(targets):
            yield {}
            return
        for n in range(0, min(coord_cap, budget) + 1):
            for rest in rec(idx + 1, budget - n):
                if n:
                    out = dict(rest)
                    out[targets[idx]] = n
                    yield out
                else:
                    yield rest

    yield from rec(0, total_cap)


def realizable_typesets_bounded(
    schema: ShapeGraph, depth: int = 4, out_cap: Optional[int] = None
) -> TypesetFamily:
    """Under-approximating search for the typesets realizable under a schema.

    Grows a set of witnessed typesets: a candidate is accepted when some
    out-edge profile over already-witnessed target typesets (or the
    candidate itself, covering self-recursive shapes) makes exactly the
    candidate's types satisfiable.  ``depth`` bounds the per-label edge
    budget of the profiles; ``out_cap`` bounds each per-typeset count and
    defaults to one more than the largest finite arity bound.

    This is a test oracle, not a decision procedure: raising the bounds
    can only grow the result.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    types = sorted(schema.types)
    if out_cap is None:
        finite_bounds = [
            int(m.hi) for m in schema.arity_map.values() if m.hi != INF
        ]
        out_cap = max(2, max(finite_bounds, default=1) + 1)
    labels = sorted(schema.labels)
    candidates = [
        frozenset(c)
        for r in range(1, len(types) + 1)
        for c in _combinations(types, r)
    ]
    realized: list[Typeset] = []
    changed = True
    while changed:
        changed = False
        for cand in candidates:
            if cand in realized:
                continue
            if _candidate_realizable(schema, cand, realized, labels, out_cap, depth):
                realized.append(cand)
                changed = True
    return TypesetFamily(frozenset(realized), provenance="bounded-search")


def _combinations(items: Sequence[str], r: int):
    from itertools import combinations

    return combinations(items, r)


def _candidate_realizable(
    schema: ShapeGraph,
    cand: Typeset,
    realized: Sequence[Typeset],
    labels: Sequence[str],
    coord_cap: int,
    total_cap: int,
) -> bool:
    """Can a node realize exactly ``cand`` with targets among known typesets?

    Per label, enumerate count vectors and record which type sets are exactly
    satisfiable; then check some per-label combination intersects to ``cand``.
    The candidate itself is allowed as a target, which makes the check a
    self-consistent (greatest-fixpoint style) witness; unfolding it yields a
    finite graph realizing the typeset.
    """
    targets = tuple(sorted(set(realized) | {cand}, key=sorted))
    all_types = sorted(schema.types)
    reachable: set[frozenset[str]] = {frozenset(all_types)}
    for label in labels:
        sats: set[frozenset[str]] = set()
        for vector in _vectors(targets, coord_cap, total_cap):
            sat = frozenset(
                t
                for t in all_types
                if _label_profile_feasible(schema, t, label, vector)
            )
            sats.add(sat)
            if len(sats) > 4096:
                break
        reachable = {r & s for r in reachable for s in sats}
        if not any(cand <= r for r in reachable):
            return False
    return cand in reachable
