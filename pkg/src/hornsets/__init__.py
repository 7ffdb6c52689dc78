"""Satisfiability and intersection of term-set predicates defined by
restricted Horn programs, built on a path/congruence term representation and
a deletion-based well-founded order."""

from .deletions import (
    Deletion,
    GlobalCongruence,
    IncompatibleDeletionError,
    InvalidDeletionResultError,
    ResourceExhaustedError,
    SearchBudget,
    check_global,
    cong_member,
    del_cong,
    del_path,
    del_seq,
    del_term,
    leq_plain,
    leq_star,
    less_plain,
    less_set,
    seq_compatible,
)
from .engine import (
    BoundSet,
    Clause,
    Diagnostic,
    Goal,
    HornProgram,
    InhResult,
    IntersectionIncoherentError,
    InvalidProgramError,
    bound_set,
    enumerate_extension,
    inh,
    intersect,
    validate_program,
)
from .paths import (
    Congruence,
    InvalidReprError,
    OutOfUniverseError,
    TermRepr,
    UndefinedPathError,
    close_mx,
    close_paths,
    format_path,
    is_instance,
    lci_repr,
    paths_of,
    repr_of,
    repr_term_of,
    subterm_at,
    term_of,
    validate_repr,
)
from .syntax import (
    ParseError,
    SourceProgram,
    parse_goal,
    parse_path,
    parse_program,
    parse_term,
    parse_term_inferring,
    render_clause,
    render_program,
)
from .terms import (
    App,
    Signature,
    SignatureError,
    Term,
    Var,
    alpha_eq,
    apply,
    canonical,
    classify_substitution,
    decompose_substitution,
    lci,
    match,
    mgu,
    rename_apart,
    render_term,
    vars_of,
)

__all__ = [name for name in dir() if not name.startswith("_")]
