"""GR(1) realizability checking, counterstrategy extraction, and minimal
assumptions-refinement search."""

from .formula import (
    Gr1Class,
    Gr1Element,
    Gr1Spec,
    ParseError,
    Valuation,
    VarKind,
    Variable,
    canonical_form,
    eval_expr,
    parse_element,
    parse_spec,
    pretty_print,
)
from .game import (
    Arena,
    Counterstrategy,
    RealizableSpecError,
    VarCapError,
    assumptions_satisfiable,
    build_arena,
    compute_counterstrategy,
    realizable,
)
from .modelcheck import eliminates, lasso_oracle, reachable, satisfies
from .refine import (
    CounterstrategyStore,
    MemoizedEliminates,
    RefinementEntry,
    count_sets,
    is_minimal,
    is_redundant,
    minimal_refinement,
)
from .bias import BiasConfig, apply_bias, enumerate_templates
from .search import (
    Mode,
    SearchConfig,
    SearchResult,
    duplicate_key,
    emit_csv,
    refinement_search,
)

__all__ = [
    "Arena",
    "BiasConfig",
    "Counterstrategy",
    "CounterstrategyStore",
    "Gr1Class",
    "Gr1Element",
    "Gr1Spec",
    "MemoizedEliminates",
    "Mode",
    "ParseError",
    "RealizableSpecError",
    "RefinementEntry",
    "SearchConfig",
    "SearchResult",
    "Valuation",
    "VarCapError",
    "VarKind",
    "Variable",
    "apply_bias",
    "assumptions_satisfiable",
    "build_arena",
    "canonical_form",
    "compute_counterstrategy",
    "count_sets",
    "duplicate_key",
    "eliminates",
    "emit_csv",
    "enumerate_templates",
    "eval_expr",
    "is_minimal",
    "is_redundant",
    "lasso_oracle",
    "minimal_refinement",
    "parse_element",
    "parse_spec",
    "pretty_print",
    "reachable",
    "realizable",
    "refinement_search",
    "satisfies",
]

__version__ = "0.1.0"
