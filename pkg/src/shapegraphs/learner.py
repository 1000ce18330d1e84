"""Schema inference from typed graphs.

The pipeline: collect the typesets present, derive type inclusion, fix a
total enumeration order, then per context infer minimum arities ascending
and maximum arities descending, and finally relax any definition the
input fails to witness.  The output always validates the input (witness
mode); on characteristic inputs it reproduces the canonical form of the
goal schema.

Maximum arities follow a case analysis per type:

* unbounded: every typeset observed among the context's targets that
  contains the type shows strictly more occurrences than its size, and no
  equivalent type has already absorbed the unbounded evidence;
* mandatory: a type with minimum 1 and no unbounded evidence is exactly 1;
* characterized: a typeset containing only the type and its supertypes
  pins the maximum by subtraction, unless an infinite equivalent type
  shadows it (then the residual is zero);
* obfuscated: no characterizing typeset exists; the maximum is decided
  from the typesets whose members all look finite, by the one-cover
  subtraction or the two-cover overlap comparison.

Raw values outside {0, 1} are clamped and flagged; the relaxation pass
restores consistency with the input where clamping lost information.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .analysis import (
    ContextStats,
    InclusionRelation,
    TypesetFamily,
    Typeset,
    characterizing_typeset,
    derive_inclusion,
    linearize,
    typesets_of_graph,
)
from .graphs import TypedGraph
from .intervals import INF, Interval, Multiplicity
from .schema import Context, ShapeGraph
from .validate import EXHAUSTIVE_THRESHOLD, check_membership


@dataclass(frozen=True)
class Derivation:
    context: Context
    type: str
    phase: str  # "min" or "max"
    case: str
    value: object

    def record(self) -> dict:
        return {
            "phase": self.phase,
            "context": list(self.context),
            "type": self.type,
            "case": self.case,
            "value": "inf" if self.value == INF else self.value,
        }


@dataclass(frozen=True)
class Relaxation:
    context: Context
    type: str
    before: Multiplicity
    after: Multiplicity

    def record(self) -> dict:
        return {
            "phase": "relax",
            "context": list(self.context),
            "type": self.type,
            "case": "widen",
            "value": f"{self.before}->{self.after}",
        }


@dataclass(frozen=True)
class LearnerReport:
    schema: ShapeGraph
    order: tuple[str, ...]
    family: TypesetFamily
    inclusion: InclusionRelation
    derivations: tuple[Derivation, ...]
    relaxations: tuple[Relaxation, ...]
    flags: tuple[str, ...] = field(default=())

    def records(self) -> list[dict]:
        out = [d.record() for d in self.derivations]
        out.extend(r.record() for r in self.relaxations)
        return out


def infer_minarity(
    stats: ContextStats,
    incl: InclusionRelation,
    order: Sequence[str],
) -> tuple[dict[str, int], list[str]]:
    """Ascending pass: each type's minimum is its exact minimum occurrence
    minus the minima already attributed to its subtypes and order-earlier
    equivalents.  Values are clamped into {0, 1} with a flag."""
    minima: dict[str, int] = {}
    flags: list[str] = []
    for t in order:
        raw = stats.minoccur(t)
        for s in order:
            if s == t:
                break
            if s in minima and incl.subseteq(s, t):
                raw -= minima[s]
        if raw < 0 or raw > 1:
            flags.append(
                f"clamped minarity {raw} for {t} in {stats.context}"
            )
            raw = min(1, max(0, raw))
        minima[t] = raw
    return minima, flags


def _unbounded_evidence(
    stats: ContextStats, t: str
) -> Optional[bool]:
    """Does every observed typeset containing ``t`` overshoot its size?

    Returns None when the type never occurs among the context's targets.
    """
    observed = [ts for ts in stats.observed_typesets if t in ts]
    if not observed:
        return None
    return all(stats.maxoccur(ts) >= len(ts) + 1 for ts in observed)


def infer_maxarity(
    stats: ContextStats,
    family: TypesetFamily,
    incl: InclusionRelation,
    order: Sequence[str],
    minima: Mapping[str, int],
) -> tuple[dict[str, object], list[Derivation], list[str]]:
    """Descending pass with the four-case analysis; see module docstring."""
    context = stats.context
    maxima: dict[str, object] = {}
    derivations: list[Derivation] = []
    flags: list[str] = []
    unbounded_ish = {t: _unbounded_evidence(stats, t) for t in order}

    def assigned_inf(s: str) -> bool:
        return s in maxima and maxima[s] == INF

    def looks_infinite(s: str, current: str) -> bool:
        if s in maxima:
            return maxima[s] == INF
        return bool(unbounded_ish.get(s)) and s != current

    for t in reversed(order):
        case = None
        value: object = None
        blocked = any(
            assigned_inf(s) for s in order if s != t and incl.equivalent(s, t)
        )
        if unbounded_ish[t] and not blocked:
            case, value = "unbounded", INF
        elif minima[t] == 1:
            case, value = "mandatory", 1
        else:
            characterizing = characterizing_typeset(t, context, family, incl)
            if characterizing is not None:
                others = sorted(characterizing - {t})
                if any(assigned_inf(s) for s in others):
                    # the evidence is absorbed by an infinite equivalent
                    case, value = "characterized-shadowed", 0
                else:
                    raw = stats.maxoccur(characterizing)
                    for s in others:
                        raw -= maxima[s] if s in maxima else minima[s]
                        if s not in maxima:
                            flags.append(
                                f"pending maxarity for {s} estimated by its minimum"
                                f" in {context}"
                            )
                    value = raw
                    if raw < 0 or raw > 1:
                        flags.append(
                            f"clamped maxarity {raw} for {t} in {context}"
                        )
                        value = min(1, max(0, raw))
                    case = "characterized"
            else:
                cover = [
                    ts
                    for ts in family.containing(t)
                    if not any(looks_infinite(s, t) for s in ts if s != t)
                ]
                cover.sort(key=sorted)
                if not cover:
                    case, value = "obfuscated-uncovered", INF
                    flags.append(
                        f"empty cover for obfuscated {t} in {context};"
                        " treating as unbounded"
                    )
                elif len(cover) == 1:
                    ts = cover[0]
                    raw = stats.maxoccur(ts)
                    for s in ts:
                        if s == t:
                            continue
                        if s in maxima:
                            raw -= maxima[s]  # type: ignore[operator]
                        elif minima[s] > 0:
                            raw -= minima[s]
                    case = "obfuscated-single"
                    value = 1 if raw >= 1 else 0
                else:
                    t1, t2 = cover[0], cover[1]
                    overlap = sorted((t1 & t2) - {t})
                    n_shared = 0
                    for s in overlap:
                        if s in maxima:
                            n_shared += maxima[s]  # type: ignore[operator]
                        else:
                            n_shared += minima[s]
                            flags.append(
                                f"pending maxarity for {s} estimated by its"
                                f" minimum in {context}"
                            )
                    joint = stats.maxoccur([t1, t2])
                    separate = (stats.maxoccur(t1) - n_shared) + (
                        stats.maxoccur(t2) - n_shared
                    )
                    case = "obfuscated-pair"
                    value = 0 if joint - n_shared == separate else 1
        maxima[t] = value
        derivations.append(Derivation(context, t, "max", case, value))
    return maxima, derivations, flags


def relax(
    schema: ShapeGraph,
    tg: TypedGraph,
    order: Sequence[str],
    threshold: int = EXHAUSTIVE_THRESHOLD,
) -> tuple[ShapeGraph, tuple[Relaxation, ...]]:
    """Widen failing definitions until the input validates.

    For each failing (node, type, label), a canonical witness assigns every
    edge the order-least type of its target's typeset; the counts it
    induces across all carriers of the type are folded into the arities.
    Arities only widen inside the finite multiplicity lattice, so the loop
    terminates.
    """
    rank = {t: i for i, t in enumerate(order)}

    def least_type(types: frozenset[str]) -> str:
        return min(types, key=lambda t: (rank.get(t, len(rank)), t))

    out = schema
    log: list[Relaxation] = []
    while True:
        verdict = check_membership(tg, out, "witness", threshold)
        if verdict.valid:
            return out, tuple(log)
        failing = {
            (d.type, d.label)
            for d in verdict.diagnostics
            if d.type is not None and d.label is not None
        }
        if not failing:
            raise ValueError("typed graph is not proper; relaxation cannot repair it")
        for t, label in sorted(failing):
            counts: dict[str, Counter] = {}
            carriers = tg.nodes_with_type(t)
            per_node: list[Counter] = []
            for node in carriers:
                c: Counter = Counter()
                for _, a, dst in tg.graph.out(node):
                    if a == label:
                        c[least_type(tg.typing[dst])] += 1
                per_node.append(c)
            targets = sorted({s for c in per_node for s in c} | set(
                s for (t0, a, s) in out.arity_map if t0 == t and a == label
            ))
            for s in targets:
                observed = Interval.fit([c[s] for c in per_node])
                current = out.arity(t, label, s)
                widened = Multiplicity.containing(
                    observed.hull(current.interval)
                )
                if widened is not current:
                    log.append(Relaxation((t, label), s, current, widened))
                    out = out.with_arity(t, label, s, widened)


def typed_learner(
    tg: TypedGraph,
    base: Optional[Sequence[str]] = None,
    threshold: int = EXHAUSTIVE_THRESHOLD,
) -> LearnerReport:
    """Infer a shape graph that the input validates against.

    ``base`` fixes the tie-breaking total order on types (default
    lexicographic); the output is deterministic given input and order.
    """
    if not tg.graph.nodes:
        raise ValueError("cannot infer from an empty graph")
    if not tg.is_proper:
        raise ValueError("typed graph is not proper: some node has no types")
    family = typesets_of_graph(tg)
    incl = derive_inclusion(family)
    order = linearize(incl, base)
    labels = sorted(tg.graph.labels)
    arities: dict[tuple[str, str, str], Multiplicity] = {}
    derivations: list[Derivation] = []
    flags: list[str] = []
    for t0 in order:
        carriers = tg.nodes_with_type(t0)
        if not carriers:
            continue
        for label in labels:
            stats = ContextStats(tg, (t0, label))
            minima, min_flags = infer_minarity(stats, incl, order)
            flags.extend(min_flags)
            for t in order:
                derivations.append(
                    Derivation((t0, label), t, "min", "subtract", minima[t])
                )
            maxima, max_derivs, max_flags = infer_maxarity(
                stats, family, incl, order, minima
            )
            derivations.extend(max_derivs)
            flags.extend(max_flags)
            for t in order:
                lo, hi = minima[t], maxima[t]
                if hi != INF and hi < lo:
                    flags.append(
                        f"inconsistent bounds [{lo};{hi}] for {t} in"
                        f" {(t0, label)}; raising maximum"
                    )
                    hi = lo
                mult = Multiplicity.containing(
                    Interval(lo, hi if hi == INF else int(hi))
                )
                if mult is not Multiplicity.ZERO:
                    arities[(t0, label, t)] = mult
    schema = ShapeGraph(arities, types=family.types, labels=labels)
    schema, relaxations = relax(schema, tg, order, threshold)
    return LearnerReport(
        schema=schema,
        order=order,
        family=family,
        inclusion=incl,
        derivations=tuple(derivations),
        relaxations=tuple(relaxations),
        flags=tuple(flags),
    )
