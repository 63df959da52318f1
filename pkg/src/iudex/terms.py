"""Immutable term language: atoms, integers, strings, variables, compounds.

Terms are plain frozen dataclasses compared structurally.  Substitutions are
kept idempotent by construction (binding a variable rewrites every existing
binding), which makes ``apply`` a single pass and keeps unification sound
without a separate dereference step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional


class Term:
    """Base class for all term variants."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Variable(Term):
    name: str


@dataclass(frozen=True, slots=True)
class Atom(Term):
    symbol: str


@dataclass(frozen=True, slots=True)
class Int(Term):
    value: int


@dataclass(frozen=True, slots=True)
class Str(Term):
    value: str


@dataclass(frozen=True, slots=True)
class Compound(Term):
    functor: str
    args: tuple[Term, ...]

    def __post_init__(self) -> None:
        if not self.args:
            raise ValueError("compound terms need at least one argument; use Atom for arity 0")
        object.__setattr__(self, "args", tuple(self.args))


def compound(functor: str, *args: Term) -> Compound:
    return Compound(functor, tuple(args))


NIL = Atom("[]")
CONS = "."


def from_list(items: Iterable[Term]) -> Term:
    """Build a cons-list term from Python items."""
    out: Term = NIL
    for item in reversed(list(items)):
        out = Compound(CONS, (item, out))
    return out


def to_list(term: Term) -> Optional[list[Term]]:
    """Unpack a proper cons-list term, or None if ``term`` is not one."""
    items: list[Term] = []
    while True:
        if term == NIL:
            return items
        if isinstance(term, Compound) and term.functor == CONS and len(term.args) == 2:
            items.append(term.args[0])
            term = term.args[1]
        else:
            return None


def variables_of(term: Term) -> set[str]:
    """Names of every variable occurring in ``term``."""
    out: set[str] = set()
    _collect_vars(term, out)
    return out


def _collect_vars(term: Term, out: set[str]) -> None:
    if isinstance(term, Variable):
        out.add(term.name)
    elif isinstance(term, Compound):
        for arg in term.args:
            _collect_vars(arg, out)


def is_ground(term: Term) -> bool:
    if isinstance(term, Variable):
        return False
    if isinstance(term, Compound):
        return all(is_ground(a) for a in term.args)
    return True


def is_callable_term(term: Term) -> bool:
    """Atoms and compounds may head a clause or be called as goals."""
    return isinstance(term, (Atom, Compound))


def occurs_in(name: str, term: Term) -> bool:
    if isinstance(term, Variable):
        return term.name == name
    if isinstance(term, Compound):
        return any(occurs_in(name, a) for a in term.args)
    return False


def rename_term(term: Term, mapping: Mapping[str, str]) -> Term:
    """Rename variables per ``mapping``; unmapped variables are preserved."""
    if isinstance(term, Variable):
        new = mapping.get(term.name)
        return Variable(new) if new is not None else term
    if isinstance(term, Compound):
        return Compound(term.functor, tuple(rename_term(a, mapping) for a in term.args))
    return term


class Substitution:
    """An idempotent, acyclic finite map from variable names to terms."""

    __slots__ = ("_bindings",)

    def __init__(self, bindings: Mapping[str, Term] | None = None):
        self._bindings: dict[str, Term] = dict(bindings) if bindings else {}

    @property
    def bindings(self) -> Mapping[str, Term]:
        return dict(self._bindings)

    def __bool__(self) -> bool:
        return bool(self._bindings)

    def __len__(self) -> int:
        return len(self._bindings)

    def __contains__(self, name: str) -> bool:
        return name in self._bindings

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Substitution) and self._bindings == other._bindings

    def __repr__(self) -> str:
        inner = ", ".join(f"{k} -> {v}" for k, v in sorted(self._bindings.items()))
        return f"{{{inner}}}"

    def get(self, name: str) -> Optional[Term]:
        return self._bindings.get(name)

    def items(self) -> Iterator[tuple[str, Term]]:
        return iter(self._bindings.items())

    def apply(self, term: Term) -> Term:
        """Replace every bound variable in ``term`` by its binding."""
        if isinstance(term, Variable):
            bound = self._bindings.get(term.name)
            return bound if bound is not None else term
        if isinstance(term, Compound):
            if not self._bindings:
                return term
            return Compound(term.functor, tuple(self.apply(a) for a in term.args))
        return term

    def extended(self, name: str, value: Term) -> Optional["Substitution"]:
        """Bind ``name`` to ``value``, keeping idempotence and acyclicity.

        Returns None when the occurs check fails.  ``value`` is resolved
        against the current bindings first, then the new binding is pushed
        through every existing one so the result stays idempotent.
        """
        value = self.apply(value)
        if isinstance(value, Variable) and value.name == name:
            return self
        if occurs_in(name, value):
            return None
        one = Substitution({name: value})
        merged = {k: one.apply(v) for k, v in self._bindings.items()}
        merged[name] = value
        return Substitution(merged)

    def project(self, names: Iterable[str]) -> "Substitution":
        """Restrict to the given variable names (dropping identity bindings)."""
        keep = {}
        for n in names:
            bound = self._bindings.get(n)
            if bound is not None and bound != Variable(n):
                keep[n] = bound
        return Substitution(keep)


EMPTY_SUBSTITUTION = Substitution()


def unify(t1: Term, t2: Term, within: Substitution = EMPTY_SUBSTITUTION) -> Optional[Substitution]:
    """Most-general unifier of two terms, extending ``within``.

    Returns None when the terms are not unifiable.  The occurs check is
    always on: unifying a variable with a term containing it fails.
    """
    t1 = within.apply(t1)
    t2 = within.apply(t2)
    if t1 == t2:
        return within
    if isinstance(t1, Variable):
        return within.extended(t1.name, t2)
    if isinstance(t2, Variable):
        return within.extended(t2.name, t1)
    if isinstance(t1, Compound) and isinstance(t2, Compound):
        if t1.functor != t2.functor or len(t1.args) != len(t2.args):
            return None
        out: Optional[Substitution] = within
        for a, b in zip(t1.args, t2.args):
            out = unify(a, b, out)
            if out is None:
                return None
        return out
    return None


def order_key(term: Term):
    """Sort key realizing the standard order of terms.

    Variables < Ints < Atoms < Strs < Compounds; within one kind the order
    is lexicographic / numeric / arity-then-functor-then-args.
    """
    if isinstance(term, Variable):
        return (0, term.name)
    if isinstance(term, Int):
        return (1, term.value)
    if isinstance(term, Atom):
        return (2, term.symbol)
    if isinstance(term, Str):
        return (3, term.value)
    assert isinstance(term, Compound)
    return (4, len(term.args), term.functor, tuple(order_key(a) for a in term.args))
