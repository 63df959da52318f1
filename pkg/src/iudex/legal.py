"""The art. 192 layer: policies, evidence assessments and verdicts.

The legal logic itself lives in ``data/rules_art192.case`` so it can be
read and edited as rules; this module parameterizes that pack with a
Policy, runs it over a case knowledge base, and turns solutions into
assessments, verdicts and rendered rulings.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, fields
from functools import lru_cache
from importlib import resources
from typing import Iterable, Literal as TypingLiteral, Optional, Union

from .caselang import format_term, parse_program
from .engine import (
    Clause,
    KnowledgeBase,
    ProofNode,
    Solution,
    fact,
    proof_tags,
    solve,
)
from .errors import UnknownPlaceholder
from .terms import Atom, Compound, Int, Term, Variable, is_ground, order_key

Level = TypingLiteral["hi", "lo"]
LEVELS = ("hi", "lo")

GROUND_NO_EVIDENCE = "there is no evidence of the crime"
GROUND_NOT_SUFFICIENT = "the evidence is not sufficient"
GROUND_CONTRADICTORY = "the evidence is contradictory"


@dataclass(frozen=True)
class Policy:
    """Aggregation thresholds for art. 192.

    ``min_evidence_count`` is a strict lower bound: aggregation needs
    strictly more distinct evidences than this.
    """

    min_evidence_count: int = 1
    require_severe_precise: bool = True
    colocation_window_minutes: int = 10
    scene_window_minutes: int = 15
    corroboration_threshold_pct: int = 80

    def __post_init__(self) -> None:
        if self.min_evidence_count < 0:
            raise ValueError("min_evidence_count must be >= 0")
        if self.colocation_window_minutes < 0:
            raise ValueError("colocation_window_minutes must be >= 0")
        if self.scene_window_minutes < 0:
            raise ValueError("scene_window_minutes must be >= 0")
        if not 0 <= self.corroboration_threshold_pct <= 100:
            raise ValueError("corroboration_threshold_pct must be within 0-100")

    def as_dict(self) -> dict[str, Union[int, bool]]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


POLICY_FIELDS = tuple(f.name for f in fields(Policy))


@dataclass(frozen=True)
class EvidenceAssessment:
    """One derived statement that two individuals are the same person."""

    descriptor: Term
    subject_x: str
    subject_y: str
    severity: Level
    precision: Level
    supporting_tags: frozenset[str]

    def __post_init__(self) -> None:
        if self.subject_x == self.subject_y:
            raise ValueError("an identity evidence needs two distinct subjects")
        if not is_ground(self.descriptor):
            raise ValueError(f"descriptor must be ground, got {self.descriptor!r}")

    def as_dict(self) -> dict:
        return {
            "descriptor": format_term(self.descriptor),
            "severity": self.severity,
            "precision": self.precision,
            "supporting_tags": sorted(self.supporting_tags),
        }


@dataclass(frozen=True)
class Responsible:
    suspect: str
    perpetrator_alias: str
    crime: str
    date: Term
    place: str
    crime_evidence: ProofNode
    identity_evidences: tuple[EvidenceAssessment, ...]


@dataclass(frozen=True)
class Acquitted:
    ground: str


Verdict = Union[Responsible, Acquitted]


# ---------------------------------------------------------------------------
# Rule pack


@lru_cache(maxsize=1)
def _rule_pack() -> tuple[Clause, ...]:
    text = resources.files("iudex.data").joinpath("rules_art192.case").read_text("utf-8")
    return parse_program(text).clauses


def standard_rules(policy: Policy) -> list[Clause]:
    """The art. 192 rule pack plus the policy facts it reads."""
    def flag(value: bool) -> Term:
        return Atom("true" if value else "false")

    settings = [
        fact(Compound("policy_min_evidence_count", (Int(policy.min_evidence_count),))),
        fact(Compound("policy_require_severe_precise", (flag(policy.require_severe_precise),))),
        fact(Compound("policy_colocation_window_minutes", (Int(policy.colocation_window_minutes),))),
        fact(Compound("policy_scene_window_minutes", (Int(policy.scene_window_minutes),))),
        fact(Compound("policy_corroboration_threshold_pct", (Int(policy.corroboration_threshold_pct),))),
    ]
    return list(_rule_pack()) + settings


def with_rules(kb: KnowledgeBase, policy: Policy) -> KnowledgeBase:
    return kb.load(standard_rules(policy))


# ---------------------------------------------------------------------------
# Reliability handling


def declared_witnesses(kb: KnowledgeBase) -> dict[str, str]:
    """Witness/source names with their declared reliability levels."""
    out: dict[str, str] = {}
    for sol in solve(kb, Compound("reliable", (Variable("W"), Variable("L")))):
        who = sol.bindings.get("W")
        level = sol.bindings.get("L")
        if isinstance(who, Atom) and isinstance(level, Atom):
            out.setdefault(who.symbol, level.symbol)
    return out


def override_reliability(kb: KnowledgeBase, witness: str, level: str) -> KnowledgeBase:
    """Replace every ``reliable(witness, _)`` fact with the given level."""
    target = Atom(witness)
    return kb.replace_facts(
        "reliable", 2,
        lambda cl: isinstance(cl.head, Compound) and cl.head.args[0] == target,
        fact(Compound("reliable", (target, Atom(level)))),
    )


# ---------------------------------------------------------------------------
# Assessment and aggregation


def _severity_of(term: Optional[Term]) -> Level:
    if isinstance(term, Atom) and term.symbol in LEVELS:
        return term.symbol  # type: ignore[return-value]
    raise ValueError(f"expected hi or lo, got {term!r}")


def assess_evidences(kb: KnowledgeBase, policy: Policy, x: str, y: str) -> list[EvidenceAssessment]:
    """All distinct identity assessments for the pair, from enabled clauses."""
    if x == y:
        return []
    goal = Compound("evidence_same_as", (
        Variable("Ev"), Atom(x), Atom(y),
        Compound("severity", (Variable("S"),)),
        Compound("precision", (Variable("P"),)),
    ))
    merged: dict[tuple, EvidenceAssessment] = {}
    for sol in solve(with_rules(kb, policy), goal):
        descriptor = sol.bindings.get("Ev")
        assert descriptor is not None
        severity = _severity_of(sol.bindings.get("S"))
        precision = _severity_of(sol.bindings.get("P"))
        key = (order_key(descriptor), severity, precision)
        tags = proof_tags(sol.proof)
        prior = merged.get(key)
        if prior is None:
            merged[key] = EvidenceAssessment(descriptor, x, y, severity, precision, tags)
        else:
            merged[key] = EvidenceAssessment(descriptor, x, y, severity, precision,
                                             prior.supporting_tags | tags)
    return [merged[k] for k in sorted(merged)]


def same_person(kb: KnowledgeBase, policy: Policy, x: str, y: str
                ) -> Optional[list[EvidenceAssessment]]:
    """The assessment list when the aggregation rule accepts the pair."""
    goal = Compound("same_person", (Atom(x), Atom(y), Variable("Evidences")))
    for _ in solve(with_rules(kb, policy), goal):
        return assess_evidences(kb, policy, x, y)
    return None


def _perpetrators(kb_with_rules: KnowledgeBase) -> list[str]:
    goal = Compound("committed", (
        Variable("Y"), Variable("D"), Variable("C"), Variable("P"), Variable("E"),
    ))
    out: list[str] = []
    for sol in solve(kb_with_rules, goal):
        who = sol.bindings.get("Y")
        if isinstance(who, Atom) and who.symbol not in out:
            out.append(who.symbol)
    return out


def case_assessments(kb: KnowledgeBase, policy: Policy, suspect: str
                     ) -> list[EvidenceAssessment]:
    """Assessments linking the suspect to a derivable perpetrator.

    Perpetrators are tried in derivation order; the first with a nonempty
    assessment list wins, so reports and acquittal grounds agree.
    """
    for alias in _perpetrators(with_rules(kb, policy)):
        assessments = assess_evidences(kb, policy, suspect, alias)
        if assessments:
            return assessments
    return []


def adjudicate_explained(kb: KnowledgeBase, policy: Policy, suspect: str
                         ) -> tuple[Verdict, Optional[ProofNode]]:
    """Verdict plus the full derivation when the suspect is responsible."""
    goal = Compound("verdict_basis", (
        Atom(suspect), Variable("Alias"), Variable("Date"), Variable("Crime"),
        Variable("Place"), Variable("Evidences"),
    ))
    solution: Optional[Solution] = next(iter(solve(with_rules(kb, policy), goal)), None)
    if solution is None:
        assessments = case_assessments(kb, policy, suspect)
        ground = GROUND_NOT_SUFFICIENT if assessments else GROUND_NO_EVIDENCE
        return Acquitted(ground), None
    bind = solution.bindings
    alias = bind.get("Alias")
    crime = bind.get("Crime")
    place = bind.get("Place")
    date = bind.get("Date")
    assert isinstance(alias, Atom) and isinstance(crime, Atom) and isinstance(place, Atom)
    assert date is not None
    crime_proof = _find_subproof(solution.proof, "committed") or solution.proof
    verdict = Responsible(
        suspect=suspect,
        perpetrator_alias=alias.symbol,
        crime=crime.symbol,
        date=date,
        place=place.symbol,
        crime_evidence=crime_proof,
        identity_evidences=tuple(assess_evidences(kb, policy, suspect, alias.symbol)),
    )
    return verdict, solution.proof


def adjudicate(kb: KnowledgeBase, policy: Policy, suspect: str) -> Verdict:
    verdict, _ = adjudicate_explained(kb, policy, suspect)
    return verdict


def _find_subproof(proof: ProofNode, functor: str) -> Optional[ProofNode]:
    for node in proof.walk():
        goal = node.goal
        if isinstance(goal, Compound) and goal.functor == functor:
            return node
    return None


# ---------------------------------------------------------------------------
# Rendering


@lru_cache(maxsize=None)
def _default_template(name: str) -> str:
    return resources.files("iudex.data").joinpath(name).read_text("utf-8")


def format_timestamp(term: Term) -> str:
    """date(Y,Mo,Da,H,Mi) as ``Y-Mo-Da H:Mi``; other terms verbatim."""
    if isinstance(term, Compound) and term.functor == "date" and len(term.args) == 5:
        parts = [a.value for a in term.args if isinstance(a, Int)]
        if len(parts) == 5:
            y, mo, da, h, mi = parts
            return f"{y:04d}-{mo:02d}-{da:02d} {h:02d}:{mi:02d}"
    return format_term(term)


def describe_assessment(a: EvidenceAssessment) -> str:
    tags = ", ".join(sorted(a.supporting_tags)) or "no tagged facts"
    return (f"{format_term(a.descriptor)}: severity {a.severity}, "
            f"precision {a.precision} (from {tags})")


def _substitute(template: str, values: dict[str, str]) -> str:
    out = []
    for literal_text, field_name, spec, _conv in string.Formatter().parse(template):
        out.append(literal_text)
        if field_name is None:
            continue
        if field_name not in values or spec:
            raise UnknownPlaceholder(f"template placeholder {{{field_name}}} is not available")
        out.append(values[field_name])
    return "".join(out)


def render_verdict(verdict: Verdict, template: Optional[str] = None, *,
                   suspect: Optional[str] = None) -> str:
    """Human-readable ruling with the motivations for the outcome."""
    if isinstance(verdict, Responsible):
        lines = "\n".join("  - " + describe_assessment(a) for a in verdict.identity_evidences)
        values = {
            "suspect": verdict.suspect,
            "crime": verdict.crime,
            "date": format_timestamp(verdict.date),
            "place": verdict.place,
            "evidence_list": lines,
        }
        template = template if template is not None else _default_template("ruling_responsible.txt")
    else:
        values = {"suspect": suspect or "the defendant", "ground": verdict.ground}
        template = template if template is not None else _default_template("ruling_acquitted.txt")
    return _substitute(template, values)
