"""Knowledge base and resolution solver.

Clauses are tagged (for evidence toggling) and immutable; ``load`` and
``set_enabled`` return new snapshots, so concurrent solves over one snapshot
need no coordination.  The solver is plain SLD resolution: depth-first,
leftmost literal first, clauses tried in insertion order, negation as
failure restricted to ground goals.  Every solution carries a proof tree so
callers can turn derivations into motivations.
"""

from __future__ import annotations

import datetime as _dt
import itertools
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Iterator, Optional

from .errors import (
    BuiltinTypeError,
    DepthLimitExceeded,
    InstantiationError,
    MalformedClause,
    NonGroundNaf,
    UnknownTag,
)
from .terms import (
    Atom,
    Compound,
    Int,
    Substitution,
    Term,
    Variable,
    from_list,
    is_callable_term,
    is_ground,
    order_key,
    rename_term,
    to_list,
    unify,
    variables_of,
)

DEFAULT_MAX_DEPTH = 10_000

NAF_FUNCTOR = "\\+"
SETOF_FUNCTOR = "setof"


# ---------------------------------------------------------------------------
# Clauses and literals


class Literal:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Call(Literal):
    goal: Term


@dataclass(frozen=True, slots=True)
class Naf(Literal):
    goal: Term


@dataclass(frozen=True, slots=True)
class Builtin(Literal):
    name: str
    args: tuple[Term, ...]

    def as_term(self) -> Term:
        return Compound(self.name, self.args)


@dataclass(frozen=True, slots=True)
class Clause:
    head: Term
    body: tuple[Literal, ...] = ()
    tag: Optional[str] = None
    enabled: bool = True

    @property
    def is_fact(self) -> bool:
        return not self.body

    def variable_names(self) -> set[str]:
        names = variables_of(self.head)
        for lit in self.body:
            names |= variables_of(_literal_term(lit))
        return names


def _literal_term(lit: Literal) -> Term:
    if isinstance(lit, Call):
        return lit.goal
    if isinstance(lit, Naf):
        return Compound(NAF_FUNCTOR, (lit.goal,))
    assert isinstance(lit, Builtin)
    return lit.as_term()


def literal_from_term(term: Term) -> Literal:
    """Classify a body term as a call, a NAF wrapper or a builtin."""
    if isinstance(term, Compound) and term.functor == NAF_FUNCTOR and len(term.args) == 1:
        return Naf(term.args[0])
    key = _indicator(term)
    if key in BUILTINS:
        assert isinstance(term, Compound)
        return Builtin(term.functor, term.args)
    return Call(term)


def _indicator(term: Term) -> tuple[str, int]:
    if isinstance(term, Atom):
        return (term.symbol, 0)
    if isinstance(term, Compound):
        return (term.functor, len(term.args))
    return ("", -1)


def clause(head: Term, *body_terms: Term, tag: Optional[str] = None) -> Clause:
    """Convenience constructor that classifies body terms into literals."""
    return Clause(head, tuple(literal_from_term(t) for t in body_terms), tag=tag)


def fact(head: Term, tag: Optional[str] = None) -> Clause:
    return Clause(head, (), tag=tag)


# ---------------------------------------------------------------------------
# Proof trees


FACT = "fact"
RULE = "rule"
BUILTIN = "builtin"
NAF_SUCCESS = "naf-success"


@dataclass(frozen=True, slots=True)
class Justification:
    kind: str
    clause: Optional[Clause] = None

    def describe(self) -> str:
        if self.kind == RULE and self.clause is not None:
            from .caselang import format_term

            return f"rule({format_term(self.clause.head)})"
        return self.kind


@dataclass(frozen=True, slots=True)
class ProofNode:
    goal: Term
    justification: Justification
    children: tuple["ProofNode", ...] = ()

    def walk(self) -> Iterator["ProofNode"]:
        yield self
        for child in self.children:
            yield from child.walk()


def proof_tags(proof: ProofNode) -> frozenset[str]:
    """Evidence tags of every tagged clause used anywhere in the proof."""
    tags = set()
    for node in proof.walk():
        cl = node.justification.clause
        if cl is not None and cl.tag is not None:
            tags.add(cl.tag)
    return frozenset(tags)


def _resolve_proof(node: ProofNode, subst: Substitution) -> ProofNode:
    return ProofNode(
        subst.apply(node.goal),
        node.justification,
        tuple(_resolve_proof(c, subst) for c in node.children),
    )


# ---------------------------------------------------------------------------
# Knowledge base


class KnowledgeBase:
    """An immutable, insertion-ordered store of tagged clauses."""

    __slots__ = ("_clauses", "_index")

    def __init__(self, clauses: Iterable[Clause] = ()):
        self._clauses: tuple[Clause, ...] = tuple(clauses)
        index: dict[tuple[str, int], list[Clause]] = {}
        for cl in self._clauses:
            index.setdefault(_indicator(cl.head), []).append(cl)
        self._index = {k: tuple(v) for k, v in index.items()}

    @property
    def clauses(self) -> tuple[Clause, ...]:
        return self._clauses

    def load(self, new_clauses: Iterable[Clause]) -> "KnowledgeBase":
        """Append clauses, preserving the order of everything already loaded."""
        incoming = tuple(new_clauses)
        for cl in incoming:
            if not is_callable_term(cl.head):
                raise MalformedClause(f"clause head must be an atom or compound, got {cl.head!r}")
        return KnowledgeBase(self._clauses + incoming)

    def clauses_for(self, functor: str, arity: int) -> tuple[Clause, ...]:
        return tuple(c for c in self._index.get((functor, arity), ()) if c.enabled)

    def tags(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for cl in self._clauses:
            if cl.tag is not None:
                seen.setdefault(cl.tag)
        return tuple(seen)

    def enabled_tags(self) -> frozenset[str]:
        return frozenset(c.tag for c in self._clauses if c.tag is not None and c.enabled)

    def set_enabled(self, tag: str, on: bool) -> "KnowledgeBase":
        """Toggle every clause carrying ``tag``; unknown tags are an error."""
        if tag not in self.tags():
            raise UnknownTag(f"no clause carries tag {tag!r}")
        return KnowledgeBase(
            replace(c, enabled=on) if c.tag == tag else c for c in self._clauses
        )

    def replace_facts(self, functor: str, arity: int, match: Callable[[Clause], bool],
                      replacement: Clause) -> "KnowledgeBase":
        """Swap every matching clause of one predicate for ``replacement``."""
        out = []
        for cl in self._clauses:
            if _indicator(cl.head) == (functor, arity) and match(cl):
                out.append(replace(replacement, tag=cl.tag, enabled=cl.enabled))
            else:
                out.append(cl)
        return KnowledgeBase(out)


# ---------------------------------------------------------------------------
# Builtins

# Table of (name, arity) -> evaluator.  Evaluators receive already
# substituted argument terms and yield one substitution per solution.


def _require_int(term: Term, builtin: str) -> int:
    if isinstance(term, Variable):
        raise InstantiationError(f"{builtin}: argument not sufficiently instantiated")
    if not isinstance(term, Int):
        raise BuiltinTypeError(f"{builtin}: expected an integer, got {term!r}")
    return term.value


def _require_list(term: Term, builtin: str) -> list[Term]:
    if isinstance(term, Variable):
        raise InstantiationError(f"{builtin}: list argument not sufficiently instantiated")
    items = to_list(term)
    if items is None:
        raise BuiltinTypeError(f"{builtin}: expected a proper list, got {term!r}")
    return items


def _bi_length(args: tuple[Term, ...], subst: Substitution) -> Iterator[Substitution]:
    items = _require_list(args[0], "length/2")
    out = unify(args[1], Int(len(items)), subst)
    if out is not None:
        yield out


def _bi_member(args: tuple[Term, ...], subst: Substitution) -> Iterator[Substitution]:
    for item in _require_list(args[1], "member/2"):
        out = unify(args[0], item, subst)
        if out is not None:
            yield out


def _compare(op: str) -> Callable[[tuple[Term, ...], Substitution], Iterator[Substitution]]:
    ops = {
        ">": lambda a, b: a > b,
        "<": lambda a, b: a < b,
        ">=": lambda a, b: a >= b,
        "=<": lambda a, b: a <= b,
    }
    test = ops[op]

    def run(args: tuple[Term, ...], subst: Substitution) -> Iterator[Substitution]:
        a = _require_int(args[0], op)
        b = _require_int(args[1], op)
        if test(a, b):
            yield subst

    return run


def _bi_not_unifiable(args: tuple[Term, ...], subst: Substitution) -> Iterator[Substitution]:
    left, right = args
    if not is_ground(left) or not is_ground(right):
        raise InstantiationError("\\=: both arguments must be ground")
    if left != right:
        yield subst


def _eval_arith(term: Term) -> int:
    if isinstance(term, Int):
        return term.value
    if isinstance(term, Variable):
        raise InstantiationError("is/2: expression not sufficiently instantiated")
    if isinstance(term, Compound) and term.functor in ("+", "-", "*") and len(term.args) == 2:
        a = _eval_arith(term.args[0])
        b = _eval_arith(term.args[1])
        if term.functor == "+":
            return a + b
        if term.functor == "-":
            return a - b
        return a * b
    raise BuiltinTypeError(f"is/2: cannot evaluate {term!r}")


def _bi_is(args: tuple[Term, ...], subst: Substitution) -> Iterator[Substitution]:
    value = Int(_eval_arith(args[1]))
    out = unify(args[0], value, subst)
    if out is not None:
        yield out


def _as_datetime(term: Term, builtin: str) -> _dt.datetime:
    if isinstance(term, Variable):
        raise InstantiationError(f"{builtin}: date argument not sufficiently instantiated")
    if not (isinstance(term, Compound) and term.functor == "date" and len(term.args) == 5):
        raise BuiltinTypeError(f"{builtin}: expected date(Y,Mo,Da,H,Mi), got {term!r}")
    parts = [_require_int(a, builtin) for a in term.args]
    try:
        return _dt.datetime(*parts)  # proleptic Gregorian, naive civil time
    except ValueError as exc:
        raise BuiltinTypeError(f"{builtin}: malformed date: {exc}") from exc


def _bi_minutes_between(args: tuple[Term, ...], subst: Substitution) -> Iterator[Substitution]:
    d1 = _as_datetime(args[0], "minutes_between/3")
    d2 = _as_datetime(args[1], "minutes_between/3")
    minutes = abs(int((d1 - d2).total_seconds()) // 60)
    out = unify(args[2], Int(minutes), subst)
    if out is not None:
        yield out


BUILTINS: dict[tuple[str, int], Callable[[tuple[Term, ...], Substitution], Iterator[Substitution]]] = {
    ("length", 2): _bi_length,
    ("member", 2): _bi_member,
    (">", 2): _compare(">"),
    ("<", 2): _compare("<"),
    (">=", 2): _compare(">="),
    ("=<", 2): _compare("=<"),
    ("\\=", 2): _bi_not_unifiable,
    ("is", 2): _bi_is,
    ("minutes_between", 3): _bi_minutes_between,
}


def eval_builtin(name: str, args: tuple[Term, ...],
                 subst: Substitution = Substitution()) -> Iterator[Substitution]:
    """Evaluate one builtin over already substituted arguments."""
    try:
        fn = BUILTINS[(name, len(args))]
    except KeyError:
        raise BuiltinTypeError(f"unknown builtin {name}/{len(args)}") from None
    return fn(args, subst)


# ---------------------------------------------------------------------------
# Renaming apart


def rename_apart(cl: Clause, fresh_seed: Iterator[int],
                 avoid: frozenset[str] = frozenset()) -> Clause:
    """Alphabetic variant of ``cl`` with variables nobody has issued before.

    ``fresh_seed`` is a shared counter (e.g. ``itertools.count``); each
    renaming consumes one value, so successive renamings are disjoint.
    Names already carrying a ``_<n>`` suffix from an earlier renaming are
    stripped back to their base before the new suffix is attached.
    """
    names = cl.variable_names()
    if not names:
        return cl
    n = next(fresh_seed)
    while True:
        mapping = {old: f"{_base_name(old)}_{n}" for old in names}
        if len(set(mapping.values())) != len(mapping):
            # stripped bases collided (e.g. X alongside X_1): keep full names
            mapping = {old: f"{old}_{n}" for old in names}
        if not (set(mapping.values()) & avoid):
            break
        n = next(fresh_seed)
    new_body = []
    for lit in cl.body:
        if isinstance(lit, Call):
            new_body.append(Call(rename_term(lit.goal, mapping)))
        elif isinstance(lit, Naf):
            new_body.append(Naf(rename_term(lit.goal, mapping)))
        else:
            assert isinstance(lit, Builtin)
            new_body.append(Builtin(lit.name, tuple(rename_term(a, mapping) for a in lit.args)))
    return Clause(rename_term(cl.head, mapping), tuple(new_body), tag=cl.tag, enabled=cl.enabled)


def _base_name(name: str) -> str:
    stem, _, suffix = name.rpartition("_")
    if stem and suffix.isdigit():
        return stem
    return name


# ---------------------------------------------------------------------------
# Solver


@dataclass(frozen=True, slots=True)
class Solution:
    bindings: Substitution
    proof: ProofNode


# The search runs over an explicit stack instead of recursive generators, so
# a depth-10 000 branch costs list entries, not interpreter stack frames.
# A state is (work, subst, proofs): ``work`` is the remaining agenda of
# literals to solve plus assembly markers, ``proofs`` the completed proof
# nodes so far.  When a clause body is scheduled, a marker follows it; once
# the body's nodes are complete the marker folds them into the rule's node.


@dataclass(frozen=True, slots=True)
class _Task:
    literal: Literal
    depth: int


@dataclass(frozen=True, slots=True)
class _Assemble:
    goal: Term
    justification: Justification
    n_children: int


@dataclass(frozen=True, slots=True)
class _State:
    work: tuple
    subst: Substitution
    proofs: tuple[ProofNode, ...]


class _Solver:
    def __init__(self, kb: KnowledgeBase, max_depth: int, avoid: frozenset[str]):
        self.kb = kb
        self.max_depth = max_depth
        self.counter = itertools.count(1)
        self.avoid = avoid

    def run(self, body: tuple[Literal, ...], subst: Substitution,
            depth: int) -> Iterator[_State]:
        """Depth-first enumeration of all final states for ``body``."""
        initial = _State(tuple(_Task(lit, depth) for lit in body), subst, ())
        stack: list[Iterator[_State]] = [iter((initial,))]
        while stack:
            state = next(stack[-1], None)
            if state is None:
                stack.pop()
                continue
            if not state.work:
                yield state
                continue
            stack.append(self._expand(state))

    def _expand(self, state: _State) -> Iterator[_State]:
        item, rest = state.work[0], state.work[1:]
        if isinstance(item, _Assemble):
            children = state.proofs[len(state.proofs) - item.n_children:]
            kept = state.proofs[:len(state.proofs) - item.n_children]
            node = ProofNode(state.subst.apply(item.goal), item.justification, children)
            return iter((_State(rest, state.subst, kept + (node,)),))
        assert isinstance(item, _Task)
        if item.depth > self.max_depth:
            raise DepthLimitExceeded(
                f"resolution depth exceeded {self.max_depth}; the query likely does not terminate"
            )
        return self._expand_literal(item.literal, item.depth, rest, state)

    def _expand_literal(self, lit: Literal, depth: int, rest: tuple,
                        state: _State) -> Iterator[_State]:
        if isinstance(lit, Builtin):
            applied = tuple(state.subst.apply(a) for a in lit.args)
            node = ProofNode(Compound(lit.name, applied), Justification(BUILTIN))
            for out in eval_builtin(lit.name, applied, state.subst):
                yield _State(rest, out, state.proofs + (node,))
            return
        if isinstance(lit, Naf):
            goal = state.subst.apply(lit.goal)
            if not is_ground(goal):
                raise NonGroundNaf(f"negated goal is not ground: {goal!r}")
            for _ in self.run((Call(goal),), state.subst, depth + 1):
                return
            node = ProofNode(Compound(NAF_FUNCTOR, (goal,)), Justification(NAF_SUCCESS))
            yield _State(rest, state.subst, state.proofs + (node,))
            return
        assert isinstance(lit, Call)
        goal = state.subst.apply(lit.goal)
        if _indicator(goal) == (SETOF_FUNCTOR, 3):
            yield from self._expand_setof(goal, depth, rest, state)
            return
        functor, arity = _indicator(goal)
        if arity < 0:
            raise MalformedClause(f"goal is not callable: {goal!r}")
        # Unknown predicates yield no solutions: the closed-world reading.
        for cl in self.kb.clauses_for(functor, arity):
            fresh = rename_apart(cl, self.counter, self.avoid)
            out = unify(goal, fresh.head, state.subst)
            if out is None:
                continue
            kind = Justification(FACT if fresh.is_fact else RULE, cl)
            agenda = tuple(_Task(b, depth + 1) for b in fresh.body)
            marker = _Assemble(goal, kind, len(fresh.body))
            yield _State(agenda + (marker,) + rest, out, state.proofs)

    def _expand_setof(self, goal: Term, depth: int, rest: tuple,
                      state: _State) -> Iterator[_State]:
        assert isinstance(goal, Compound)
        template, inner_goal, result = goal.args
        collected = self.collect(template, inner_goal, state.subst, depth)
        if not collected:
            return
        out = unify(result, from_list(collected), state.subst)
        if out is None:
            return
        node = ProofNode(out.apply(goal), Justification(BUILTIN))
        yield _State(rest, out, state.proofs + (node,))

    def collect(self, template: Term, goal: Term, subst: Substitution,
                depth: int) -> list[Term]:
        seen: list[Term] = []
        for final in self.run((Call(goal),), subst, depth + 1):
            instance = final.subst.apply(template)
            if instance not in seen:
                seen.append(instance)
        seen.sort(key=order_key)
        return seen


def solve(kb: KnowledgeBase, goal: Term,
          max_depth: int = DEFAULT_MAX_DEPTH) -> Iterator[Solution]:
    """Enumerate all derivations of ``goal`` with their proof trees.

    Solutions come in a deterministic order (clause insertion order,
    depth-first, leftmost literal first).  Yielded substitutions are
    projected onto the variables of ``goal``.  Raises DepthLimitExceeded
    past ``max_depth`` nested resolution steps.
    """
    if not is_callable_term(goal):
        raise MalformedClause(f"goal is not callable: {goal!r}")
    goal_vars = variables_of(goal)
    solver = _Solver(kb, max_depth, frozenset(goal_vars))
    for final in solver.run((Call(goal),), Substitution(), 0):
        root = final.proofs[0]
        yield Solution(final.subst.project(goal_vars), _resolve_proof(root, final.subst))


def solve_naf(kb: KnowledgeBase, goal: Term, max_depth: int = DEFAULT_MAX_DEPTH) -> bool:
    """True iff the ground ``goal`` has no derivation (negation as failure)."""
    if not is_ground(goal):
        raise NonGroundNaf(f"negated goal is not ground: {goal!r}")
    for _ in solve(kb, goal, max_depth):
        return False
    return True


def collect_distinct(kb: KnowledgeBase, template: Term, goal: Term,
                     max_depth: int = DEFAULT_MAX_DEPTH) -> Optional[list[Term]]:
    """All distinct template instances over the goal's solutions, sorted
    by the standard order of terms; None when the goal has no solutions."""
    solver = _Solver(kb, max_depth, frozenset())
    collected = solver.collect(template, goal, Substitution(), 0)
    return collected or None


def lint_undefined_predicates(kb: KnowledgeBase) -> list[tuple[str, int]]:
    """Predicates called in rule bodies but defined nowhere in ``kb``.

    Under the closed-world reading such calls simply fail, which is usually
    a typo rather than an intent; this check is separate from solving and
    never affects it.  Builtins and the collection goal are not reported.
    """
    defined = {_indicator(c.head) for c in kb.clauses}
    missing: dict[tuple[str, int], None] = {}

    def visit(goal: Term) -> None:
        key = _indicator(goal)
        if key == (SETOF_FUNCTOR, 3):
            assert isinstance(goal, Compound)
            visit(goal.args[1])
            return
        if key not in defined and key not in BUILTINS and key[1] >= 0:
            missing.setdefault(key)

    for cl in kb.clauses:
        for lit in cl.body:
            if isinstance(lit, (Call, Naf)):
                visit(lit.goal)
    return list(missing)
