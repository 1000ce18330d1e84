"""Shape graphs: total arity functions from (type, label, type) to multiplicities.

Storage is sparse; absent triples mean the zero multiplicity, and zero
entries are dropped at construction so that structural equality is
meaningful.  Type and label namespaces must not overlap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Tuple

from .intervals import Multiplicity

Context = Tuple[str, str]  # (source type, edge label)


@dataclass(frozen=True)
class ShapeGraph:
    arity_map: Mapping[Tuple[str, str, str], Multiplicity] = field(compare=False)
    types: frozenset[str]
    labels: frozenset[str]
    _key: tuple = field(repr=False)

    def __init__(
        self,
        arities: Mapping[Tuple[str, str, str], Multiplicity],
        types: Iterable[str] = (),
        labels: Iterable[str] = (),
    ) -> None:
        cleaned = {
            triple: mult
            for triple, mult in arities.items()
            if mult is not Multiplicity.ZERO
        }
        all_types = set(types)
        all_labels = set(labels)
        for t, a, s in cleaned:
            all_types.update((t, s))
            all_labels.add(a)
        clash = all_types & all_labels
        if clash:
            raise ValueError(f"names used both as type and as label: {sorted(clash)}")
        object.__setattr__(self, "arity_map", cleaned)
        object.__setattr__(self, "types", frozenset(all_types))
        object.__setattr__(self, "labels", frozenset(all_labels))
        key = tuple(sorted((t, a, s, m.name) for (t, a, s), m in cleaned.items()))
        object.__setattr__(
            self, "_key", (key, tuple(sorted(all_types)), tuple(sorted(all_labels)))
        )

    def arity(self, t: str, label: str, s: str) -> Multiplicity:
        return self.arity_map.get((t, label, s), Multiplicity.ZERO)

    def arity_in(self, context: Context, s: str) -> Multiplicity:
        t, label = context
        return self.arity(t, label, s)

    def minarity(self, t: str, label: str, s: str) -> int:
        return self.arity(t, label, s).lo

    def maxarity(self, t: str, label: str, s: str):
        return self.arity(t, label, s).hi

    def context_targets(self, context: Context) -> tuple[str, ...]:
        """Types with a nonzero arity in the given (type, label) context."""
        t, label = context
        return tuple(
            sorted(s for (t0, a, s) in self.arity_map if t0 == t and a == label)
        )

    def contexts(self) -> tuple[Context, ...]:
        return tuple(sorted({(t, a) for (t, a, _) in self.arity_map}))

    def with_arity(self, t: str, label: str, s: str, mult: Multiplicity) -> "ShapeGraph":
        updated = dict(self.arity_map)
        if mult is Multiplicity.ZERO:
            updated.pop((t, label, s), None)
        else:
            updated[(t, label, s)] = mult
        return ShapeGraph(updated, self.types, self.labels)

    def __str__(self) -> str:
        from .textio import format_schema

        return format_schema(self)
