"""Shape graphs: validation, canonization, and inference from typed graphs."""

from .analysis import (
    ContextStats,
    ContextUnobservedError,
    InclusionRelation,
    TypesetFamily,
    characterizing_typeset,
    cover_sets,
    derive_inclusion,
    is_obfuscated,
    linearize,
    occur,
    realizable_typesets_bounded,
    typesets_of_graph,
)
from .canon import (
    CanonizationTrace,
    RuleApplication,
    canonize,
    covered_by,
    is_canonical,
    replay,
    residual_equal,
    type_equal,
)
from .chargen import (
    ChargenError,
    ProfileRequirement,
    characteristic,
    extend_with_random_member,
    weakly_characteristic,
)
from .graphs import Graph, TypedGraph, disjoint_union
from .intervals import INF, Interval, Multiplicity, fit_interval, fit_multiplicity
from .learner import LearnerReport, relax, typed_learner
from .schema import ShapeGraph
from .textio import (
    ParseError,
    format_schema,
    format_typed_graph,
    parse_schema,
    parse_typed_graph,
)
from .validate import (
    Diagnostic,
    Verdict,
    check_membership,
    maximal_typing,
    witness_feasible,
)

__all__ = [
    "INF",
    "CanonizationTrace",
    "ChargenError",
    "ContextStats",
    "ContextUnobservedError",
    "Diagnostic",
    "Graph",
    "InclusionRelation",
    "Interval",
    "LearnerReport",
    "Multiplicity",
    "ParseError",
    "ProfileRequirement",
    "RuleApplication",
    "ShapeGraph",
    "TypedGraph",
    "TypesetFamily",
    "Verdict",
    "canonize",
    "characteristic",
    "characterizing_typeset",
    "check_membership",
    "cover_sets",
    "covered_by",
    "derive_inclusion",
    "disjoint_union",
    "extend_with_random_member",
    "fit_interval",
    "fit_multiplicity",
    "format_schema",
    "format_typed_graph",
    "is_canonical",
    "is_obfuscated",
    "linearize",
    "maximal_typing",
    "occur",
    "parse_schema",
    "parse_typed_graph",
    "realizable_typesets_bounded",
    "relax",
    "replay",
    "residual_equal",
    "type_equal",
    "typed_learner",
    "typesets_of_graph",
    "weakly_characteristic",
    "witness_feasible",
]
