"""Term language, alphabets, histories, recursion, and base utilities."""

from .config import (ActionDecl, ActionKind, CommTable, DeadlockMode,
                     SystemConfig, ValidationReport, assemble_config,
                     bar_name, create_act_name, create_request_name,
                     validate_config)
from .guarded import (EquationReport, Guardedness, GuardednessReport,
                      check_guarded, is_syntactically_guarded)
from .hist import EMPTY_HIST, Hist, hist_extend, hist_is_wellformed, mk_hist
from .seqmap import (map_domain_subtract, map_empty, map_override, maplet,
                     seq_concat, seq_elems, seq_hd, seq_tl)
from .terms import (DELTA, EPSILON, Act, Alt, CommMerge, Delta, Encap,
                    Epsilon, LeftMerge, Par, PosSi, RecConst, RecSpec, Seq,
                    Si, Term, Var, action_names, alt_of, canonical_term,
                    free_vars, is_basic, is_closed, substitute, subterms,
                    term_size, term_sort_key)

__all__ = [
    "ActionDecl", "ActionKind", "CommTable", "DeadlockMode", "SystemConfig",
    "ValidationReport", "assemble_config", "bar_name", "create_act_name",
    "create_request_name", "validate_config",
    "EquationReport", "Guardedness", "GuardednessReport", "check_guarded",
    "is_syntactically_guarded",
    "EMPTY_HIST", "Hist", "hist_extend", "hist_is_wellformed", "mk_hist",
    "map_domain_subtract", "map_empty", "map_override", "maplet",
    "seq_concat", "seq_elems", "seq_hd", "seq_tl",
    "DELTA", "EPSILON", "Act", "Alt", "CommMerge", "Delta", "Encap",
    "Epsilon", "LeftMerge", "Par", "PosSi", "RecConst", "RecSpec", "Seq",
    "Si", "Term", "Var", "action_names", "alt_of", "canonical_term",
    "free_vars", "is_basic", "is_closed", "substitute", "subterms",
    "term_size", "term_sort_key",
]
