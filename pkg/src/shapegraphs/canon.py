"""Canonization of shape graphs relative to a typeset family and type order.

Three rewrite stages run to fixpoint, strictly staged:

1. min-shift: between equivalent types, a mandatory occurrence held by an
   order-later type migrates to the order-earliest one.
2. star-widen: a type whose every containing typeset also holds some
   infinite-arity type (not equivalent to it) gets the full star arity;
   the occurrence it required can always ride on the infinite neighbor.
3. zero-swap: a finite optional-or-one arity migrates to an order-later
   zero-arity type when the two types agree outside the infinite-arity
   types of the context.

All predicates are evaluated against an explicitly supplied family, so an
under-approximate family simply makes fewer rules fire.  Types that occur
in no member are never rewritten.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .analysis import InclusionRelation, TypesetFamily, derive_inclusion
from .intervals import Interval, Multiplicity
from .schema import Context, ShapeGraph

Typeset = frozenset[str]


def type_equal(t: str, t2: str, family: TypesetFamily) -> bool:
    """Membership of the two types agrees across every member."""
    return all((t in m) == (t2 in m) for m in family.members)


def covered_by(t: str, cover: Sequence[str], family: TypesetFamily) -> bool:
    """Every member containing ``t`` contains some type from ``cover``."""
    cover_set = set(cover)
    return all(m & cover_set for m in family.members if t in m)


def residual_equal(
    t: str, t2: str, excluded: Sequence[str], family: TypesetFamily
) -> bool:
    """Outside members touching ``excluded``, the two types co-occur exactly."""
    excluded_set = set(excluded)
    return all(
        (t in m) == (t2 in m) for m in family.members if not (m & excluded_set)
    )


@dataclass(frozen=True)
class RuleApplication:
    rule: str
    context: Context
    types: tuple[str, ...]
    before: tuple[Multiplicity, ...]
    after: tuple[Multiplicity, ...]

    def record(self) -> dict:
        return {
            "phase": "canonize",
            "rule": self.rule,
            "context": list(self.context),
            "types": list(self.types),
            "before": [str(m) for m in self.before],
            "after": [str(m) for m in self.after],
        }


CanonizationTrace = tuple[RuleApplication, ...]


def replay(schema: ShapeGraph, trace: CanonizationTrace) -> ShapeGraph:
    """Re-apply a trace; reproduces the canonization output."""
    out = schema
    for app in trace:
        t0, label = app.context
        for s, mult in zip(app.types, app.after):
            out = out.with_arity(t0, label, s, mult)
    return out


def _raise_min(mult: Multiplicity) -> Multiplicity:
    interval = Interval(1, max(mult.hi, 1))
    return Multiplicity.containing(interval)


def _drop_min(mult: Multiplicity) -> Multiplicity:
    return Multiplicity.containing(Interval(0, mult.hi))


def canonize(
    schema: ShapeGraph,
    family: TypesetFamily,
    base: Optional[Sequence[str]] = None,
) -> tuple[ShapeGraph, CanonizationTrace]:
    """Apply the three stages exhaustively; deterministic scan order."""
    occurring = sorted(family.types & schema.types)
    order = sorted(schema.types) if base is None else list(base)
    missing = [t for t in schema.types if t not in order]
    if missing:
        raise ValueError(f"base order does not cover schema types: {missing}")
    index = {t: i for i, t in enumerate(order)}
    arities = dict(schema.arity_map)
    trace: list[RuleApplication] = []

    def arity(t0: str, a: str, s: str) -> Multiplicity:
        return arities.get((t0, a, s), Multiplicity.ZERO)

    def set_arity(t0: str, a: str, s: str, mult: Multiplicity) -> None:
        if mult is Multiplicity.ZERO:
            arities.pop((t0, a, s), None)
        else:
            arities[(t0, a, s)] = mult

    contexts = sorted(
        {(t0, a) for t0 in schema.types for a in schema.labels},
        key=lambda c: (index[c[0]], c[1]),
    )
    by_order = sorted(occurring, key=lambda t: index[t])

    equal_pairs = [
        (t, t2)
        for t in by_order
        for t2 in by_order
        if index[t] < index[t2] and type_equal(t, t2, family)
    ]

    # Stage 1: shift mandatory occurrences down to order-least equivalent types.
    changed = True
    while changed:
        changed = False
        for t0, a in contexts:
            for t, t2 in equal_pairs:
                m1, m2 = arity(t0, a, t), arity(t0, a, t2)
                if m1.lo == 0 and m2.lo == 1:
                    new1, new2 = _raise_min(m1), _drop_min(m2)
                    set_arity(t0, a, t, new1)
                    set_arity(t0, a, t2, new2)
                    trace.append(
                        RuleApplication(
                            "min-shift", (t0, a), (t, t2), (m1, m2), (new1, new2)
                        )
                    )
                    changed = True

    # Stage 2: widen to star under coverage by infinite, non-equivalent types.
    changed = True
    while changed:
        changed = False
        for t0, a in contexts:
            infinite = [s for s in by_order if arity(t0, a, s).is_infinite]
            for t in by_order:
                mult = arity(t0, a, t)
                if mult.is_infinite:
                    continue
                cover = [
                    s for s in infinite if s != t and not type_equal(s, t, family)
                ]
                if cover and covered_by(t, cover, family):
                    set_arity(t0, a, t, Multiplicity.STAR)
                    trace.append(
                        RuleApplication(
                            "star-widen",
                            (t0, a),
                            (t,),
                            (mult,),
                            (Multiplicity.STAR,),
                        )
                    )
                    changed = True

    # Stage 3: move finite optional/one arities to order-later residual twins.
    changed = True
    while changed:
        changed = False
        for t0, a in contexts:
            infinite = [s for s in by_order if arity(t0, a, s).is_infinite]
            if not infinite:
                continue
            for t in by_order:
                mult = arity(t0, a, t)
                if mult not in (Multiplicity.OPT, Multiplicity.ONE):
                    continue
                for t2 in by_order:
                    if index[t2] <= index[t]:
                        continue
                    if arity(t0, a, t2) is not Multiplicity.ZERO:
                        continue
                    if type_equal(t, t2, family):
                        continue
                    if residual_equal(t, t2, infinite, family):
                        set_arity(t0, a, t, Multiplicity.ZERO)
                        set_arity(t0, a, t2, mult)
                        trace.append(
                            RuleApplication(
                                "zero-swap",
                                (t0, a),
                                (t, t2),
                                (mult, Multiplicity.ZERO),
                                (Multiplicity.ZERO, mult),
                            )
                        )
                        changed = True
                        break

    return ShapeGraph(arities, schema.types, schema.labels), tuple(trace)


def is_canonical(
    schema: ShapeGraph,
    family: TypesetFamily,
    base: Optional[Sequence[str]] = None,
) -> bool:
    result, _ = canonize(schema, family, base)
    return result == schema


def equivalence_class_min_sums(
    schema: ShapeGraph,
    family: TypesetFamily,
) -> dict[tuple[Context, Typeset], int]:
    """Per context and equivalence class, the sum of member minarities.

    This quantity is invariant across equivalent schemas, which makes it a
    cheap fingerprint for canonization tests.
    """
    incl = derive_inclusion(family)
    classes = {}
    for t in sorted(family.types):
        classes.setdefault(incl.equivalence_class(t), None)
    sums: dict[tuple[Context, Typeset], int] = {}
    for t0 in sorted(schema.types):
        for a in sorted(schema.labels):
            for cls in classes:
                total = sum(schema.arity(t0, a, s).lo for s in cls)
                sums[((t0, a), cls)] = total
    return sums
