"""Construction of (weakly) characteristic typed graphs for a schema.

A weakly characteristic graph realizes every typeset of the supplied
family and, for every context and typeset, exhibits nodes pinning the
minimal and maximal edge counts toward that typeset (one more than the
typeset's size when the maximum is unbounded).  Additional per-type
minimum witnesses make the exact occurrence minima coincide with the
schema's lower-bound sums, which the occurrence propositions require.

The fully characteristic variant adds, for every type left without a
characterizing typeset in a context, pair nodes that saturate the union
of every two finite covering typesets; these let the learner separate a
union type from its parts.

All nodes are wired to per-typeset representative pools, so the output
stays polynomial in the family size.  Every generated graph is validated
in witness mode before being returned.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Optional, Sequence

from .analysis import (
    TypesetFamily,
    Typeset,
    characterizing_typeset,
    derive_inclusion,
)
from .graphs import Graph, TypedGraph
from .intervals import INF
from .schema import Context, ShapeGraph
from .validate import check_membership, label_assignment_feasible


class ChargenError(ValueError):
    pass


@dataclass(frozen=True)
class ProfileRequirement:
    context: Context
    typeset: Typeset
    kind: str  # "min" | "max" | "pair"
    count: int


def _typeset_name(typeset: Typeset) -> str:
    return "+".join(sorted(typeset))


def typeset_min_count(schema: ShapeGraph, context: Context, typeset: Typeset) -> int:
    t, a = context
    return sum(schema.arity(t, a, s).lo for s in typeset)


def typeset_max_count(schema: ShapeGraph, context: Context, typeset: Typeset) -> int:
    """Member-wise bound sum; one more than the size when unbounded."""
    t, a = context
    if any(schema.arity(t, a, s).hi == INF for s in typeset):
        return len(typeset) + 1
    return sum(int(schema.arity(t, a, s).hi) for s in typeset)


Vector = dict[Typeset, int]


class _ProfileSolver:
    """Finds deterministic per-label count vectors feasible for a host typeset."""

    def __init__(self, schema: ShapeGraph, family: TypesetFamily):
        self.schema = schema
        self.family = family
        self.members = family.sorted_members()
        finite = [int(m.hi) for m in schema.arity_map.values() if m.hi != INF]
        self.coord_cap = max(finite, default=1) + 2
        self._feasible_cache: dict = {}

    def _bounds(self, t: str, label: str):
        return {
            s: self.schema.arity(t, label, s)
            for s in self.schema.context_targets((t, label))
        }

    def _label_ok(self, t: str, label: str, canon: tuple) -> bool:
        key = (t, label, canon)
        hit = self._feasible_cache.get(key)
        if hit is None:
            targets: list[Typeset] = []
            for typeset, n in canon:
                targets.extend([typeset] * n)
            hit = label_assignment_feasible(targets, self._bounds(t, label))
            self._feasible_cache[key] = hit
        return hit

    def feasible(self, host: Typeset, label: str, vector: Mapping[Typeset, int]) -> bool:
        canon = tuple(
            sorted(((ts, n) for ts, n in vector.items() if n), key=lambda kv: sorted(kv[0]))
        )
        return all(self._label_ok(t, label, canon) for t in sorted(host))

    def useful_targets(self, host: Typeset, label: str) -> tuple[Typeset, ...]:
        """Typesets an edge may point to without dooming some host member.

        An edge toward a typeset sharing no nonzero-arity type with some
        member's context cannot be assigned for that member, so such
        coordinates never appear in feasible vectors.
        """
        out = []
        for member in self.members:
            if all(member & set(self._bounds(t, label)) for t in host):
                out.append(member)
        return tuple(out)

    def vector_key(self, vector: Mapping[Typeset, int], toward: Optional[str]):
        count = (
            sum(n for ts, n in vector.items() if toward in ts) if toward else 0
        )
        return (
            count,
            sum(vector.values()),
            tuple(sorted((sorted(ts), n) for ts, n in vector.items() if n)),
        )

    def best_vector(
        self,
        host: Typeset,
        label: str,
        pinned: Optional[Mapping[Typeset, int]] = None,
        minimize_toward: Optional[str] = None,
    ) -> Optional[Vector]:
        """Least feasible vector extending ``pinned``.

        Ranked by (count toward ``minimize_toward``, total, lexicographic),
        so results are deterministic.  Returns None when nothing within the
        caps is feasible.
        """
        pinned = dict(pinned or {})
        free = [ts for ts in self.useful_targets(host, label) if ts not in pinned]
        budget = (
            max(
                (sum(m.lo for m in self._bounds(t, label).values()) for t in host),
                default=0,
            )
            + 2
        )
        best: Optional[Vector] = None
        best_key = None
        for vec in self._enumerate(free, budget):
            full = dict(pinned)
            full.update(vec)
            if not self.feasible(host, label, full):
                continue
            key = self.vector_key(full, minimize_toward)
            if best_key is None or key < best_key:
                best, best_key = full, key
        return best

    def _enumerate(self, coords: Sequence[Typeset], budget: int):
        def rec(idx: int, left: int):
            if idx == len(coords):
                yield {}
                return
            for n in range(0, min(self.coord_cap, left) + 1):
                for rest in rec(idx + 1, left - n):
                    if n:
                        out = {coords[idx]: n}
                        out.update(rest)
                        yield out
                    else:
                        yield rest

        yield from rec(0, budget)


class _GraphAssembler:
    """Accumulates node profiles, then materializes pools and edges."""

    def __init__(self, solver: _ProfileSolver):
        self.solver = solver
        self.profiles: dict[str, tuple[Typeset, dict[str, Vector]]] = {}
        self._dedup: dict = {}

    @staticmethod
    def _profile_key(host: Typeset, vectors: dict[str, Vector]):
        return (
            host,
            tuple(
                sorted(
                    (
                        label,
                        tuple(
                            sorted(
                                (tuple(sorted(ts)), n)
                                for ts, n in vec.items()
                                if n
                            )
                        ),
                    )
                    for label, vec in vectors.items()
                )
            ),
        )

    def add(self, name: str, host: Typeset, vectors: dict[str, Vector]) -> str:
        key = self._profile_key(host, vectors)
        existing = self._dedup.get(key)
        if existing is not None:
            return existing
        self.profiles[name] = (host, vectors)
        self._dedup[key] = name
        return name

    def solve_node(
        self,
        name: str,
        hosts: Sequence[Typeset],
        labels: Sequence[str],
        pinned: Optional[Mapping[str, Mapping[Typeset, int]]] = None,
        minimize_toward: Optional[tuple[str, str]] = None,
        best_across_hosts: bool = False,
    ) -> Optional[str]:
        """Solve one node against candidate hosts; first feasible host wins
        unless ``best_across_hosts`` ranks all hosts by the focal objective."""
        pinned = pinned or {}
        solutions = []
        for host in hosts:
            vectors: dict[str, Vector] = {}
            ok = True
            for label in labels:
                target = None
                if minimize_toward and minimize_toward[0] == label:
                    target = minimize_toward[1]
                vec = self.solver.best_vector(
                    host, label, pinned.get(label), target
                )
                if vec is None:
                    ok = False
                    break
                vectors[label] = vec
            if not ok:
                continue
            if minimize_toward:
                focal = vectors[minimize_toward[0]]
                key = self.solver.vector_key(focal, minimize_toward[1])
            else:
                key = (0,)
            solutions.append((key, sorted(host), host, vectors))
            if not best_across_hosts:
                break
        if not solutions:
            return None
        _, _, host, vectors = min(solutions, key=lambda s: (s[0], s[1]))
        return self.add(name, host, vectors)

    def materialize(self) -> TypedGraph:
        demand: dict[Typeset, int] = {ts: 1 for ts in self.solver.members}
        for host, vectors in self.profiles.values():
            for vec in vectors.values():
                for ts, n in vec.items():
                    demand[ts] = max(demand.get(ts, 1), n)
        pools: dict[Typeset, list[str]] = {
            ts: [f"rep.{_typeset_name(ts)}.{i}" for i in range(demand[ts])]
            for ts in self.solver.members
        }
        node_profiles: dict[str, tuple[Typeset, dict[str, Vector]]] = dict(
            self.profiles
        )
        for ts in self.solver.members:
            rep0 = f"rep.{_typeset_name(ts)}.0"
            if rep0 not in node_profiles:
                raise AssertionError(f"missing representative profile for {rep0}")
            for clone in pools[ts][1:]:
                node_profiles.setdefault(clone, node_profiles[rep0])
        typing = {name: set(host) for name, (host, _) in node_profiles.items()}
        edges: set[tuple[str, str, str]] = set()
        for name, (_, vectors) in sorted(node_profiles.items()):
            for label, vec in sorted(vectors.items()):
                for ts, n in sorted(vec.items(), key=lambda kv: sorted(kv[0])):
                    for target in pools[ts][:n]:
                        edges.add((name, label, target))
        return TypedGraph(Graph(set(typing), edges), typing)


def _hosts_of(family: TypesetFamily) -> dict[str, list[Typeset]]:
    return {
        t: sorted(family.containing(t), key=lambda m: (len(m), sorted(m)))
        for t in sorted(family.types)
    }


def _build_representatives(
    assembler: _GraphAssembler, family: TypesetFamily, labels: Sequence[str]
) -> None:
    for ts in family.sorted_members():
        name = f"rep.{_typeset_name(ts)}.0"
        vectors: dict[str, Vector] = {}
        for label in labels:
            vec = assembler.solver.best_vector(ts, label)
            if vec is None:
                raise ChargenError(
                    f"no feasible representative for typeset {{{_typeset_name(ts)}}}"
                )
            vectors[label] = vec
        # representatives bypass deduplication: pools are built from them
        assembler.profiles[name] = (ts, vectors)
        assembler._dedup.setdefault(assembler._profile_key(ts, vectors), name)


def _add_variants(
    schema: ShapeGraph,
    family: TypesetFamily,
    assembler: _GraphAssembler,
    labels: Sequence[str],
    requirements: list[ProfileRequirement],
) -> None:
    hosts_of = _hosts_of(family)
    context_types = sorted(schema.types & family.types)
    for t0 in context_types:
        for label in labels:
            context = (t0, label)
            for ts in family.sorted_members():
                for kind, count in (
                    ("min", typeset_min_count(schema, context, ts)),
                    ("max", typeset_max_count(schema, context, ts)),
                ):
                    requirements.append(ProfileRequirement(context, ts, kind, count))
                    name = f"{kind}.{t0}.{label}.{_typeset_name(ts)}"
                    placed = assembler.solve_node(
                        name, hosts_of[t0], labels, {label: {ts: count}}
                    )
                    if placed is None:
                        raise ChargenError(
                            f"cannot realize {kind} count {count} toward"
                            f" {{{_typeset_name(ts)}}} in context {context}"
                        )
            # per-type minimum witnesses: best over all hosts so the exact
            # occurrence minimum equals the schema's lower-bound sum
            for t in sorted(family.types):
                name = f"low.{t0}.{label}.{t}"
                placed = assembler.solve_node(
                    name,
                    hosts_of[t0],
                    labels,
                    minimize_toward=(label, t),
                    best_across_hosts=True,
                )
                if placed is None:
                    raise ChargenError(
                        f"cannot realize a minimal witness for type {t}"
                        f" in context {context}"
                    )


def _validated(tg: TypedGraph, schema: ShapeGraph) -> TypedGraph:
    verdict = check_membership(tg, schema, "witness")
    if not verdict.valid:
        raise ChargenError(
            "generated graph failed validation: "
            + "; ".join(str(d.record()) for d in verdict.diagnostics[:5])
        )
    return tg


def weakly_characteristic(
    schema: ShapeGraph,
    family: TypesetFamily,
    base: Optional[Sequence[str]] = None,
) -> TypedGraph:
    """Weakly characteristic typed graph for the schema over the family."""
    solver = _ProfileSolver(schema, family)
    assembler = _GraphAssembler(solver)
    labels = sorted(schema.labels)
    requirements: list[ProfileRequirement] = []
    _build_representatives(assembler, family, labels)
    _add_variants(schema, family, assembler, labels, requirements)
    return _validated(assembler.materialize(), schema)


def characteristic(
    schema: ShapeGraph,
    family: TypesetFamily,
    base: Optional[Sequence[str]] = None,
) -> TypedGraph:
    """Adds pair nodes for obfuscated types on top of the weak construction."""
    solver = _ProfileSolver(schema, family)
    assembler = _GraphAssembler(solver)
    labels = sorted(schema.labels)
    requirements: list[ProfileRequirement] = []
    _build_representatives(assembler, family, labels)
    _add_variants(schema, family, assembler, labels, requirements)
    incl = derive_inclusion(family)
    hosts_of = _hosts_of(family)
    for t0 in sorted(schema.types & family.types):
        for label in labels:
            context = (t0, label)
            finite = {s: schema.arity(t0, label, s).hi != INF for s in family.types}
            for t in sorted(family.types):
                if characterizing_typeset(t, context, family, incl) is not None:
                    continue
                cover = [
                    ts for ts in family.containing(t) if all(finite[s] for s in ts)
                ]
                cover.sort(key=sorted)
                if len(cover) < 2:
                    continue
                for ts1, ts2 in combinations(cover, 2):
                    union = sorted(ts1 | ts2)
                    total = sum(int(schema.arity(t0, label, s).hi) for s in union)
                    part1 = sum(int(schema.arity(t0, label, s).hi) for s in ts1)
                    pin = {ts1: part1, ts2: total - part1}
                    requirements.append(
                        ProfileRequirement(context, frozenset(union), "pair", total)
                    )
                    name = (
                        f"pair.{t0}.{label}.{_typeset_name(ts1)}"
                        f"~{_typeset_name(ts2)}"
                    )
                    placed = assembler.solve_node(
                        name, hosts_of[t0], labels, {label: pin}
                    )
                    if placed is None:
                        raise ChargenError(
                            f"cannot realize pair witness toward"
                            f" {{{_typeset_name(ts1)}}} and {{{_typeset_name(ts2)}}}"
                            f" in context {context}"
                        )
    return _validated(assembler.materialize(), schema)


def extend_with_random_member(
    schema: ShapeGraph,
    family: TypesetFamily,
    seed: int,
    size: int = 4,
    retries: int = 20,
) -> TypedGraph:
    """A pseudo-random member of the schema's language, deterministic per seed.

    Random nodes are wired to representative pools of the family's typesets;
    edge counts start from minimal feasible vectors and take random feasible
    increments.  The result is validated before being returned.
    """
    rng = random.Random(seed)
    last_error: Optional[Exception] = None
    for _ in range(retries):
        solver = _ProfileSolver(schema, family)
        assembler = _GraphAssembler(solver)
        labels = sorted(schema.labels)
        try:
            _build_representatives(assembler, family, labels)
            members = family.sorted_members()
            for i in range(size):
                host = members[rng.randrange(len(members))]
                vectors: dict[str, Vector] = {}
                ok = True
                for label in labels:
                    vec = solver.best_vector(host, label)
                    if vec is None:
                        ok = False
                        break
                    vec = dict(vec)
                    for _ in range(rng.randrange(3)):
                        candidates = solver.useful_targets(host, label)
                        if not candidates:
                            break
                        ts2 = candidates[rng.randrange(len(candidates))]
                        trial = dict(vec)
                        trial[ts2] = trial.get(ts2, 0) + 1
                        if trial[ts2] <= solver.coord_cap and solver.feasible(
                            host, label, trial
                        ):
                            vec = trial
                    vectors[label] = vec
                if ok:
                    assembler.profiles[f"extra.{i}"] = (host, vectors)
            tg = assembler.materialize()
        except ChargenError as err:
            last_error = err
            continue
        if check_membership(tg, schema, "witness").valid:
            return tg
    raise ChargenError(
        f"sampling failed after {retries} attempts (seed {seed}): {last_error}"
    )
