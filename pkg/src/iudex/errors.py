"""Exception hierarchy shared by the term language, engine and front ends."""

from __future__ import annotations


class IudexError(Exception):
    """Base class for all errors raised by this package."""


class MalformedClause(IudexError):
    """A clause whose head is not callable (e.g. a variable head)."""


class UnknownTag(IudexError):
    """An evidence tag that does not exist in the knowledge base."""


class DepthLimitExceeded(IudexError):
    """The solver hit its depth limit; the query likely does not terminate."""


class NonGroundNaf(IudexError):
    """A negation-as-failure call on a goal with unbound variables.

    Such calls flounder (their answer depends on future bindings), so the
    solver refuses them instead of guessing.
    """


class InstantiationError(IudexError):
    """A builtin argument that must be bound was left unbound."""


class BuiltinTypeError(IudexError):
    """A builtin argument of the wrong shape (non-integer arithmetic,
    malformed calendar term, improper list)."""


class CaseSyntaxError(IudexError):
    """Raised when a case-language source has one or more parse errors.

    Carries the full list of :class:`iudex.caselang.ParseError` records so
    callers can report every mistake in one pass.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        first = self.errors[0] if self.errors else None
        suffix = f" (first at {first.line}:{first.column}: {first.message})" if first else ""
        super().__init__(f"{len(self.errors)} syntax error(s){suffix}")


class UnknownPlaceholder(IudexError):
    """A ruling template referenced a placeholder that is not provided."""


class InvalidScenario(IudexError):
    """A scenario referenced unknown tags/witnesses or malformed settings.

    ``fields`` maps each offending input field to a message, so front ends
    can attach errors to the control that caused them.
    """

    def __init__(self, fields: dict[str, str]):
        self.fields = dict(fields)
        super().__init__("; ".join(f"{k}: {v}" for k, v in self.fields.items()))


class PolicyViolation(IudexError):
    """A policy override broke a policy invariant (negative window,
    threshold outside 0-100)."""

    def __init__(self, fields: dict[str, str]):
        self.fields = dict(fields)
        super().__init__("; ".join(f"{k}: {v}" for k, v in self.fields.items()))
