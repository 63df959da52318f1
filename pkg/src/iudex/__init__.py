"""iudex: an evidence-reasoning engine for legal what-if analysis.

A case is written in a small logic language (facts, Horn rules, negation
as failure); evidences are tagged so they can be toggled; an art. 192 rule
pack classifies them by severity and precision and aggregates them under a
configurable policy; verdicts come with machine-readable motivations.
"""

from .caselang import (
    ParseError,
    SourceProgram,
    format_clause,
    format_program,
    format_term,
    parse_program,
    parse_term,
    tokenize,
)
from .engine import (
    Builtin,
    Call,
    Clause,
    KnowledgeBase,
    Naf,
    ProofNode,
    Solution,
    clause,
    collect_distinct,
    eval_builtin,
    fact,
    lint_undefined_predicates,
    proof_tags,
    rename_apart,
    solve,
    solve_naf,
)
from .errors import (
    BuiltinTypeError,
    CaseSyntaxError,
    DepthLimitExceeded,
    InstantiationError,
    InvalidScenario,
    IudexError,
    MalformedClause,
    NonGroundNaf,
    PolicyViolation,
    UnknownPlaceholder,
    UnknownTag,
)
from .legal import (
    Acquitted,
    EvidenceAssessment,
    Policy,
    Responsible,
    Verdict,
    adjudicate,
    assess_evidences,
    override_reliability,
    render_verdict,
    same_person,
    standard_rules,
)
from .scenario import (
    Case,
    RunReport,
    ScenarioSpec,
    bundled_case_path,
    evaluate,
    load_case,
    run_scenario,
    run_suite,
)
from .terms import (
    Atom,
    Compound,
    Int,
    Str,
    Substitution,
    Term,
    Variable,
    from_list,
    to_list,
    unify,
)

__version__ = "0.1.0"
