"""Lazy AC-matching and AC-rewriting.

Matching modulo associativity-commutativity returns a stream of
substitutions computed on demand; strategies built on top of it return lazy
lists of terms. An eager engine and a brute-force enumerator are included as
references.
"""

from .constraints import (
    FAIL,
    ID,
    And,
    Constraint,
    Fail,
    Id,
    Match,
    Next,
    Or,
    Triplet,
    extract_substitution,
    is_lazy_list,
    matches_grammar,
    simplify_algebraic,
)
from .eager import SolutionSet, brute_force_match, eager_match
from .lazy import (
    BudgetExceeded,
    LazyMatcher,
    SolutionStream,
    StreamExhausted,
    lazy_normal_form,
    match_lazy,
    normalize_r3_down,
    normalize_r12,
    stream_head,
    stream_next,
)
from .strategies import (
    DecoratedTerm,
    Rule,
    apply_constraint_to_term,
    apply_strategy,
    apply_traversal,
    force_next_termlist,
    iter_terms,
    lift_decorated,
    termlist_head,
    termlist_next,
)
from .surjections import DomainError, Surjection, apply_surjection, rank, surjection_count, unrank
from .syntax import ParseError, parse_rule, parse_rules, parse_signature, parse_strategy, parse_term
from .terms import App, Signature, SignatureError, Symbol, Var, ac_equal, count_ac_symbols, flatten, subst_apply

__version__ = "0.1.0"
