"""Scenario evaluation shared by the CLI and the what-if service.

A Case bundles the parsed knowledge base with everything the front ends
need (tags, presets, witnesses, the default policy).  A ScenarioSpec says
which evidences to enable and which overrides to apply; ``evaluate`` turns
one into a RunReport with a deterministic structured form.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from .caselang import SourceProgram, format_literal, format_term, parse_program
from .engine import KnowledgeBase, ProofNode, literal_from_term, solve
from .errors import InvalidScenario, PolicyViolation
from .legal import (
    LEVELS,
    POLICY_FIELDS,
    Acquitted,
    EvidenceAssessment,
    Policy,
    Responsible,
    Verdict,
    adjudicate_explained,
    case_assessments,
    declared_witnesses,
    override_reliability,
    render_verdict,
)
from .terms import Atom, Compound, Str, Term, Variable, to_list


@dataclass(frozen=True)
class Preset:
    id: str
    enabled_tags: tuple[str, ...]
    reliability_overrides: dict[str, str]
    expected: str  # "responsible" | "acquitted"


@dataclass(frozen=True)
class Case:
    path: Optional[Path]
    case_id: str
    program: SourceProgram
    kb: KnowledgeBase
    policy: Policy
    suspect: Optional[str]
    tags: tuple[str, ...]
    witnesses: dict[str, str]
    summaries: dict[str, str]
    presets: tuple[Preset, ...]


def bundled_case_path() -> Path:
    return Path(str(resources.files("iudex.data").joinpath("valjean.case")))


def load_case(path: Union[str, Path]) -> Case:
    """Parse a case file and extract its front-end metadata.

    Raises CaseSyntaxError on parse errors and InvalidScenario on invalid
    policy directives.
    """
    path = Path(path)
    return case_from_text(path.read_text("utf-8"), case_id=path.stem, path=path)


def case_from_text(text: str, case_id: str = "case", path: Optional[Path] = None) -> Case:
    program = parse_program(text)
    kb = KnowledgeBase().load(program.clauses)
    try:
        policy = Policy(**program.policy_settings)
    except ValueError as exc:
        raise InvalidScenario({"policy": str(exc)}) from exc
    # Tag inventory comes from the file's tag directives, so a region whose
    # clauses were all removed still counts as a known (if empty) evidence.
    tags = tuple(dict.fromkeys(program.tags + kb.tags()))
    return Case(
        path=path,
        case_id=case_id,
        program=program,
        kb=kb,
        policy=policy,
        suspect=_declared_suspect(kb),
        tags=tags,
        witnesses=declared_witnesses(kb),
        summaries=_summaries(kb),
        presets=_presets(kb),
    )


def _declared_suspect(kb: KnowledgeBase) -> Optional[str]:
    for sol in solve(kb, Compound("suspect", (Variable("X"),))):
        bound = sol.bindings.get("X")
        if isinstance(bound, Atom):
            return bound.symbol
    return None


def _summaries(kb: KnowledgeBase) -> dict[str, str]:
    out: dict[str, str] = {}
    goal = Compound("evidence_summary", (Variable("Tag"), Variable("Text")))
    for sol in solve(kb, goal):
        tag = sol.bindings.get("Tag")
        text = sol.bindings.get("Text")
        if isinstance(tag, Atom) and isinstance(text, Str):
            out.setdefault(tag.symbol, text.value)
    return out


def _presets(kb: KnowledgeBase) -> tuple[Preset, ...]:
    goal = Compound("scenario", (
        Variable("Id"), Compound("evidences", (Variable("Tags"),)),
        Compound("overrides", (Variable("Ov"),)), Compound("expected", (Variable("Out"),)),
    ))
    presets = []
    for sol in solve(kb, goal):
        pid = sol.bindings.get("Id")
        tags_term = sol.bindings.get("Tags")
        overrides_term = sol.bindings.get("Ov")
        outcome = sol.bindings.get("Out")
        if not isinstance(pid, Atom) or not isinstance(outcome, Atom):
            continue
        tags = to_list(tags_term) if tags_term is not None else None
        overrides = to_list(overrides_term) if overrides_term is not None else None
        if tags is None or overrides is None:
            continue
        reliability: dict[str, str] = {}
        for item in overrides:
            if (isinstance(item, Compound) and item.functor == "reliability"
                    and len(item.args) == 2
                    and all(isinstance(a, Atom) for a in item.args)):
                reliability[item.args[0].symbol] = item.args[1].symbol
        presets.append(Preset(
            id=pid.symbol.upper(),
            enabled_tags=tuple(t.symbol for t in tags if isinstance(t, Atom)),
            reliability_overrides=reliability,
            expected=outcome.symbol,
        ))
    return tuple(presets)


# ---------------------------------------------------------------------------
# Scenario evaluation


@dataclass(frozen=True)
class ScenarioSpec:
    case_path: Union[str, Path]
    enabled_tags: Optional[frozenset[str]] = None  # None: every tag on
    reliability_overrides: dict[str, str] = field(default_factory=dict)
    policy_overrides: dict[str, Union[int, bool]] = field(default_factory=dict)
    suspect: Optional[str] = None  # None: the file's suspect directive
    explain: bool = False


@dataclass(frozen=True)
class RunReport:
    verdict: Verdict
    assessments: tuple[EvidenceAssessment, ...]
    proof: Optional[ProofNode]
    timings_ms: float
    scenario: dict
    policy: Policy
    suspect: str


def evaluate(case: Case,
             enabled_tags: Optional[frozenset[str]] = None,
             reliability_overrides: Optional[dict[str, str]] = None,
             policy_overrides: Optional[dict[str, Union[int, bool]]] = None,
             suspect: Optional[str] = None,
             explain: bool = False) -> RunReport:
    """Adjudicate one scenario over an already loaded case."""
    started = time.perf_counter()
    reliability_overrides = dict(reliability_overrides or {})
    policy_overrides = dict(policy_overrides or {})

    problems: dict[str, str] = {}
    known = set(case.tags)
    enabled = set(case.tags) if enabled_tags is None else set(enabled_tags)
    for tag in sorted(enabled - known):
        problems[f"enabled_tags.{tag}"] = f"unknown evidence tag {tag!r}"
    for witness, level in sorted(reliability_overrides.items()):
        if witness not in case.witnesses:
            problems[f"reliability_overrides.{witness}"] = f"unknown witness {witness!r}"
        elif level not in LEVELS:
            problems[f"reliability_overrides.{witness}"] = f"reliability must be hi or lo, got {level!r}"
    for key, value in sorted(policy_overrides.items()):
        if key not in POLICY_FIELDS:
            problems[f"policy_overrides.{key}"] = f"unknown policy setting {key!r}"
        elif isinstance(value, bool) != (key == "require_severe_precise") or not isinstance(value, (bool, int)):
            problems[f"policy_overrides.{key}"] = f"wrong value type for {key!r}"
    who = suspect or case.suspect
    if who is None:
        problems["suspect"] = "no suspect given and the case file declares none"
    if problems:
        raise InvalidScenario(problems)

    try:
        policy = replace(case.policy, **policy_overrides)
    except ValueError as exc:
        raise PolicyViolation({"policy_overrides": str(exc)}) from exc

    kb = case.kb
    clause_tags = set(kb.tags())
    for tag in case.tags:
        if tag in clause_tags:
            kb = kb.set_enabled(tag, tag in enabled)
    for witness, level in reliability_overrides.items():
        kb = override_reliability(kb, witness, level)

    assert who is not None
    verdict, proof = adjudicate_explained(kb, policy, who)
    if isinstance(verdict, Responsible):
        assessments = verdict.identity_evidences
    else:
        assessments = tuple(case_assessments(kb, policy, who))
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    scenario_echo = {
        "case": case.case_id,
        "suspect": who,
        "enabled_tags": sorted(enabled),
        "reliability_overrides": dict(sorted(reliability_overrides.items())),
        "explain": explain,
    }
    return RunReport(
        verdict=verdict,
        assessments=assessments,
        proof=proof if (explain and isinstance(verdict, Responsible)) else None,
        timings_ms=elapsed_ms,
        scenario=scenario_echo,
        policy=policy,
        suspect=who,
    )


def run_scenario(spec: ScenarioSpec) -> RunReport:
    """Load the spec's case file and evaluate it."""
    case = load_case(spec.case_path)
    return evaluate(
        case,
        enabled_tags=spec.enabled_tags,
        reliability_overrides=spec.reliability_overrides,
        policy_overrides=spec.policy_overrides,
        suspect=spec.suspect,
        explain=spec.explain,
    )


@dataclass(frozen=True)
class SuiteResult:
    question: str
    expected: str
    actual: str
    passed: bool


def run_suite(case_path: Union[str, Path]) -> list[SuiteResult]:
    """Evaluate every preset scenario stored in the case file."""
    case = load_case(case_path)
    return run_case_suite(case)


def run_case_suite(case: Case) -> list[SuiteResult]:
    if not case.presets:
        raise InvalidScenario({"case": "the case file defines no preset scenarios"})
    results = []
    for preset in case.presets:
        report = evaluate(
            case,
            enabled_tags=frozenset(preset.enabled_tags),
            reliability_overrides=preset.reliability_overrides,
        )
        actual = verdict_word(report.verdict)
        results.append(SuiteResult(preset.id, preset.expected, actual,
                                   actual == preset.expected))
    return results


# ---------------------------------------------------------------------------
# Structured report form (the stable schema shared with the service)


def verdict_word(verdict: Verdict) -> str:
    return "responsible" if isinstance(verdict, Responsible) else "acquitted"


def format_goal(goal: Term) -> str:
    """Proof-goal text: like format_term but with infix builtins."""
    return format_literal(literal_from_term(goal))


def proof_to_dict(node: ProofNode) -> dict:
    return {
        "goal": format_goal(node.goal),
        "justification": node.justification.describe(),
        "children": [proof_to_dict(c) for c in node.children],
    }


def report_to_dict(report: RunReport) -> dict:
    verdict = report.verdict
    return {
        "verdict": verdict_word(verdict),
        "ground": verdict.ground if isinstance(verdict, Acquitted) else None,
        "evidences": [a.as_dict() for a in report.assessments],
        "proof": proof_to_dict(report.proof) if report.proof is not None else None,
        "policy": report.policy.as_dict(),
        "scenario": report.scenario,
        "timings_ms": report.timings_ms,
    }


def report_to_text(report: RunReport) -> str:
    verdict = report.verdict
    lines = [f"verdict: {verdict_word(verdict)}"]
    if isinstance(verdict, Acquitted):
        lines.append(f"ground: {verdict.ground}")
    lines.append("")
    lines.append(render_verdict(verdict, suspect=report.suspect))
    if report.assessments and isinstance(verdict, Acquitted):
        from .legal import describe_assessment

        lines.append("evidences considered, insufficient under the policy:")
        lines.extend("  - " + describe_assessment(a) for a in report.assessments)
        lines.append("")
    if report.proof is not None:
        lines.append("proof:")
        lines.extend(_proof_lines(report.proof, 1))
        lines.append("")
    lines.append(f"elapsed: {report.timings_ms:.1f} ms")
    return "\n".join(lines)


def _proof_lines(node: ProofNode, depth: int) -> list[str]:
    out = [f"{'  ' * depth}{format_goal(node.goal)}  [{node.justification.describe()}]"]
    for child in node.children:
        out.extend(_proof_lines(child, depth + 1))
    return out
