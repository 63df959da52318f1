"""Tokenizer, parser and formatter for the textual case language.

A case file is a sequence of clauses (``head.`` or ``head :- body.``) and
directives.  Directives look like facts but use the reserved functors
``tag/1`` (opens an evidence region that covers every following clause
until the next ``tag`` or ``end_tag``), ``end_tag/0`` and ``policy/2``.

The term grammar is deliberately flat: no user-defined operators, and the
only infix forms are the builtin comparisons (``>  <  >=  =<  \\=  is``)
in body-literal position.  Beyond the core syntax the parser also accepts
parenthesized tuples ``(a, b)`` (sugar for right-nested ``','/2`` pairs,
as produced by evidence collection), list literals ``[a, b, c]`` (cons
cells) and double-quoted strings.

On a syntax error the parser skips to the next ``.`` and continues, so one
pass reports every mistake in the file.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .engine import Clause, literal_from_term, Literal, Call, Naf, Builtin, NAF_FUNCTOR
from .errors import CaseSyntaxError, IudexError
from .terms import (
    NIL,
    Atom,
    Compound,
    Int,
    Str,
    Term,
    Variable,
    from_list,
    to_list,
)


class LexError(IudexError):
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}")


@dataclass(frozen=True, slots=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


IDENT = "ident"
VAR = "var"
INT = "int"
QATOM = "qatom"
STRING = "string"
PUNCT = {"(": "(", ")": ")", "[": "[", "]": "]", ",": ",", ".": "."}
ARROW = ":-"
EOF = "eof"

INFIX_OPS = (">=", "=<", ">", "<", "\\=")
DIRECTIVE_FUNCTORS = {("tag", 1), ("end_tag", 0), ("policy", 2)}

POLICY_KEYS = {
    "min_evidence_count": "int",
    "require_severe_precise": "bool",
    "colocation_window_minutes": "int",
    "scene_window_minutes": "int",
    "corroboration_threshold_pct": "int",
}


def _is_ident_start(c: str) -> bool:
    return c.isalpha() and c.islower()


def _is_name_char(c: str) -> bool:
    return c.isalnum() or c == "_"


def tokenize(text: str) -> list[Token]:
    """Scan ``text`` into tokens; comments and whitespace are skipped but
    advance positions.  Raises LexError on unterminated quotes/comments or
    stray characters."""
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = text[i]
        if c.isspace():
            advance(1)
            continue
        if c == "%":
            while i < n and text[i] != "\n":
                advance(1)
            continue
        if text.startswith("/*", i):
            start_line, start_col = line, col
            advance(2)
            while i < n and not text.startswith("*/", i):
                advance(1)
            if i >= n:
                raise LexError("unterminated block comment", start_line, start_col)
            advance(2)
            continue
        start_line, start_col = line, col
        if c == "'":
            advance(1)
            chars: list[str] = []
            while True:
                if i >= n:
                    raise LexError("unterminated quoted atom", start_line, start_col)
                if text[i] == "'":
                    if i + 1 < n and text[i + 1] == "'":
                        chars.append("'")
                        advance(2)
                        continue
                    advance(1)
                    break
                chars.append(text[i])
                advance(1)
            lexeme = "'" + "".join(chars).replace("'", "''") + "'"
            tokens.append(Token(QATOM, lexeme, start_line, start_col))
            continue
        if c == '"':
            advance(1)
            chars = []
            while True:
                if i >= n:
                    raise LexError("unterminated string", start_line, start_col)
                if text[i] == '"':
                    if i + 1 < n and text[i + 1] == '"':
                        chars.append('"')
                        advance(2)
                        continue
                    advance(1)
                    break
                chars.append(text[i])
                advance(1)
            lexeme = '"' + "".join(chars).replace('"', '""') + '"'
            tokens.append(Token(STRING, lexeme, start_line, start_col))
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token(INT, text[i:j], start_line, start_col))
            advance(j - i)
            continue
        if _is_ident_start(c):
            j = i
            while j < n and _is_name_char(text[j]):
                j += 1
            tokens.append(Token(IDENT, text[i:j], start_line, start_col))
            advance(j - i)
            continue
        if c == "_" or (c.isalpha() and c.isupper()):
            j = i
            while j < n and _is_name_char(text[j]):
                j += 1
            tokens.append(Token(VAR, text[i:j], start_line, start_col))
            advance(j - i)
            continue
        if text.startswith(":-", i):
            tokens.append(Token(ARROW, ":-", start_line, start_col))
            advance(2)
            continue
        if text.startswith("\\+", i):
            tokens.append(Token("\\+", "\\+", start_line, start_col))
            advance(2)
            continue
        for op in INFIX_OPS:
            if text.startswith(op, i):
                tokens.append(Token("op", op, start_line, start_col))
                advance(len(op))
                break
        else:
            if c in PUNCT:
                tokens.append(Token(PUNCT[c], c, start_line, start_col))
                advance(1)
                continue
            raise LexError(f"unexpected character {c!r}", start_line, start_col)
    tokens.append(Token(EOF, "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parsing


@dataclass(frozen=True, slots=True)
class ParseError:
    line: int
    column: int
    message: str
    expected: Optional[str] = None


@dataclass(frozen=True, slots=True)
class Directive:
    kind: str  # "tag" | "end_tag" | "policy"
    line: int
    column: int
    tag_id: Optional[str] = None
    policy_key: Optional[str] = None
    policy_value: Union[int, bool, None] = None


@dataclass(frozen=True, slots=True)
class ClauseItem:
    clause: Clause
    line: int
    column: int


ProgramItem = Union[Directive, ClauseItem]


@dataclass(frozen=True)
class SourceProgram:
    items: tuple[ProgramItem, ...] = ()

    @property
    def clauses(self) -> tuple[Clause, ...]:
        return tuple(it.clause for it in self.items if isinstance(it, ClauseItem))

    @property
    def directives(self) -> tuple[Directive, ...]:
        return tuple(it for it in self.items if isinstance(it, Directive))

    @property
    def policy_settings(self) -> dict[str, Union[int, bool]]:
        out: dict[str, Union[int, bool]] = {}
        for d in self.directives:
            if d.kind == "policy" and d.policy_key is not None:
                out[d.policy_key] = d.policy_value
        return out

    @property
    def tags(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for d in self.directives:
            if d.kind == "tag" and d.tag_id:
                seen.setdefault(d.tag_id)
        return tuple(seen)


class _Recover(Exception):
    def __init__(self, error: ParseError):
        self.error = error


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        used = {t.text for t in tokens if t.kind == VAR and t.text != "_"}
        self._used_names = used
        self._anon = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != EOF:
            self.pos += 1
        return tok

    def fail(self, message: str, expected: Optional[str] = None, tok: Optional[Token] = None):
        tok = tok or self.peek()
        raise _Recover(ParseError(tok.line, tok.column, message, expected))

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            self.fail(f"expected {kind!r}, found {tok.text or 'end of input'!r}", expected=kind)
        return self.next()

    def fresh_anonymous(self) -> Variable:
        while True:
            self._anon += 1
            name = f"_G{self._anon}"
            if name not in self._used_names:
                self._used_names.add(name)
                return Variable(name)

    # terms ---------------------------------------------------------------

    def parse_term(self) -> Term:
        tok = self.peek()
        if tok.kind == VAR:
            self.next()
            if tok.text == "_":
                return self.fresh_anonymous()
            return Variable(tok.text)
        if tok.kind == INT:
            self.next()
            return Int(int(tok.text))
        if tok.kind == STRING:
            self.next()
            return Str(tok.text[1:-1].replace('""', '"'))
        if tok.kind in (IDENT, QATOM):
            self.next()
            symbol = tok.text if tok.kind == IDENT else tok.text[1:-1].replace("''", "'")
            if self.peek().kind == "(":
                self.next()
                args = self.parse_term_list(")")
                return Compound(symbol, tuple(args))
            return Atom(symbol)
        if tok.kind == "(":
            self.next()
            items = self.parse_term_list(")")
            return _tuple_term(items)
        if tok.kind == "[":
            self.next()
            if self.peek().kind == "]":
                self.next()
                return NIL
            items = self.parse_term_list("]")
            return from_list(items)
        self.fail(f"expected a term, found {tok.text or 'end of input'!r}", expected="term")

    def parse_term_list(self, closer: str) -> list[Term]:
        items = [self.parse_term()]
        while self.peek().kind == ",":
            self.next()
            items.append(self.parse_term())
        self.expect(closer)
        return items

    # clauses and directives ----------------------------------------------

    def parse_literal_term(self) -> Term:
        if self.peek().kind == "\\+":
            self.next()
            return Compound(NAF_FUNCTOR, (self.parse_term(),))
        left = self.parse_term()
        tok = self.peek()
        if tok.kind == "op":
            self.next()
            return Compound(tok.text, (left, self.parse_term()))
        if tok.kind == IDENT and tok.text == "is":
            self.next()
            return Compound("is", (left, self.parse_term()))
        return left

    def parse_item(self) -> tuple[Term, list[Term], Token]:
        """One clause or directive; returns (head, body_terms, head_token)."""
        head_tok = self.peek()
        head = self.parse_term()
        tok = self.peek()
        if tok.kind == ".":
            self.next()
            return head, [], head_tok
        if tok.kind == ARROW:
            self.next()
            body = [self.parse_literal_term()]
            while self.peek().kind == ",":
                self.next()
                body.append(self.parse_literal_term())
            self.expect(".")
            return head, body, head_tok
        self.fail(f"expected ':-' or '.', found {tok.text or 'end of input'!r}", expected=".")

    def skip_to_clause_end(self) -> None:
        while self.peek().kind not in (".", EOF):
            self.next()
        if self.peek().kind == ".":
            self.next()


def _tuple_term(items: list[Term]) -> Term:
    if len(items) == 1:
        return items[0]
    out = items[-1]
    for item in reversed(items[:-1]):
        out = Compound(",", (item, out))
    return out


def _indicator_of(term: Term) -> tuple[str, int]:
    if isinstance(term, Atom):
        return (term.symbol, 0)
    if isinstance(term, Compound):
        return (term.functor, len(term.args))
    return ("", -1)


def _directive_from(head: Term, tok: Token, seen_tags: set[str]) -> Union[Directive, ParseError]:
    key = _indicator_of(head)
    if key == ("end_tag", 0):
        return Directive("end_tag", tok.line, tok.column)
    if key == ("tag", 1):
        assert isinstance(head, Compound)
        arg = head.args[0]
        if not isinstance(arg, Atom):
            return ParseError(tok.line, tok.column, "tag id must be an atom")
        if arg.symbol in seen_tags:
            return ParseError(tok.line, tok.column, f"duplicate tag region {arg.symbol!r}")
        return Directive("tag", tok.line, tok.column, tag_id=arg.symbol)
    assert key == ("policy", 2)
    assert isinstance(head, Compound)
    key_term, value_term = head.args
    if not isinstance(key_term, Atom) or key_term.symbol not in POLICY_KEYS:
        return ParseError(tok.line, tok.column, f"unknown policy key {key_term!r}")
    expected = POLICY_KEYS[key_term.symbol]
    if expected == "int":
        if not isinstance(value_term, Int):
            return ParseError(tok.line, tok.column,
                              f"policy {key_term.symbol} expects an integer value")
        value: Union[int, bool] = value_term.value
    else:
        if not (isinstance(value_term, Atom) and value_term.symbol in ("true", "false")):
            return ParseError(tok.line, tok.column,
                              f"policy {key_term.symbol} expects true or false")
        value = value_term.symbol == "true"
    return Directive("policy", tok.line, tok.column,
                     policy_key=key_term.symbol, policy_value=value)


def parse_program(text: str) -> SourceProgram:
    """Parse a whole case file.

    Raises CaseSyntaxError carrying every ParseError found; a file with any
    error yields no program.
    """
    try:
        tokens = tokenize(text)
    except LexError as exc:
        raise CaseSyntaxError([ParseError(exc.line, exc.column, str(exc))]) from exc
    parser = _Parser(tokens)
    items: list[ProgramItem] = []
    errors: list[ParseError] = []
    current_tag: Optional[str] = None
    seen_tags: set[str] = set()
    while parser.peek().kind != EOF:
        try:
            head, body, tok = parser.parse_item()
        except _Recover as rec:
            errors.append(rec.error)
            parser.skip_to_clause_end()
            continue
        key = _indicator_of(head)
        if key in DIRECTIVE_FUNCTORS:
            if body:
                errors.append(ParseError(tok.line, tok.column,
                                         f"reserved directive {key[0]!r} cannot head a rule"))
                continue
            made = _directive_from(head, tok, seen_tags)
            if isinstance(made, ParseError):
                errors.append(made)
                continue
            if made.kind == "tag":
                current_tag = made.tag_id
                seen_tags.add(made.tag_id or "")
            elif made.kind == "end_tag":
                current_tag = None
            items.append(made)
            continue
        if isinstance(head, (Variable, Int, Str)):
            errors.append(ParseError(tok.line, tok.column,
                                     "clause head must be an atom or compound"))
            continue
        literals = tuple(literal_from_term(t) for t in body)
        items.append(ClauseItem(Clause(head, literals, tag=current_tag), tok.line, tok.column))
    if errors:
        raise CaseSyntaxError(errors)
    return SourceProgram(tuple(items))


def parse_term(text: str) -> Term:
    """Parse a single term (the whole input must be one term)."""
    try:
        tokens = tokenize(text)
    except LexError as exc:
        raise CaseSyntaxError([ParseError(exc.line, exc.column, str(exc))]) from exc
    parser = _Parser(tokens)
    try:
        term = parser.parse_term()
        if parser.peek().kind != EOF:
            parser.fail("trailing input after term")
    except _Recover as rec:
        raise CaseSyntaxError([rec.error]) from None
    return term


# ---------------------------------------------------------------------------
# Formatting


_BARE_ATOM_OK = "abcdefghijklmnopqrstuvwxyz"


def _atom_needs_quotes(symbol: str) -> bool:
    if not symbol or symbol[0] not in _BARE_ATOM_OK:
        return True
    return not all(_is_name_char(c) for c in symbol)


def format_term(term: Term) -> str:
    """Canonical text for a term; parsing it back yields an equal term."""
    if isinstance(term, Variable):
        return term.name
    if isinstance(term, Int):
        return str(term.value)
    if isinstance(term, Str):
        return '"' + term.value.replace('"', '""') + '"'
    if isinstance(term, Atom):
        if _atom_needs_quotes(term.symbol):
            return "'" + term.symbol.replace("'", "''") + "'"
        return term.symbol
    assert isinstance(term, Compound)
    as_list = to_list(term)
    if as_list is not None:
        return "[" + ", ".join(format_term(t) for t in as_list) + "]"
    if term.functor == "," and len(term.args) == 2:
        return "(" + ", ".join(format_term(t) for t in _flatten_tuple(term)) + ")"
    functor = format_term(Atom(term.functor))
    return functor + "(" + ", ".join(format_term(a) for a in term.args) + ")"


def _flatten_tuple(term: Term) -> list[Term]:
    items = []
    while isinstance(term, Compound) and term.functor == "," and len(term.args) == 2:
        items.append(term.args[0])
        term = term.args[1]
    items.append(term)
    return items


def format_literal(lit: Literal) -> str:
    if isinstance(lit, Naf):
        return "\\+ " + format_term(lit.goal)
    if isinstance(lit, Builtin):
        if lit.name in INFIX_OPS and len(lit.args) == 2:
            return f"{format_term(lit.args[0])} {lit.name} {format_term(lit.args[1])}"
        if lit.name == "is" and len(lit.args) == 2:
            return f"{format_term(lit.args[0])} is {format_term(lit.args[1])}"
        return format_term(lit.as_term())
    assert isinstance(lit, Call)
    return format_term(lit.goal)


def format_clause(cl: Clause) -> str:
    head = format_term(cl.head)
    if cl.is_fact:
        return head + "."
    body = ",\n    ".join(format_literal(lit) for lit in cl.body)
    return f"{head} :-\n    {body}."


def format_directive(d: Directive) -> str:
    if d.kind == "tag":
        return f"tag({d.tag_id})."
    if d.kind == "end_tag":
        return "end_tag."
    value = ("true" if d.policy_value else "false") if isinstance(d.policy_value, bool) \
        else str(d.policy_value)
    return f"policy({d.policy_key}, {value})."


def format_program(program: SourceProgram) -> str:
    """Canonical text for a program; reparsing yields the same structure."""
    chunks = []
    for item in program.items:
        if isinstance(item, Directive):
            chunks.append(format_directive(item))
        else:
            chunks.append(format_clause(item.clause))
    return "\n".join(chunks) + ("\n" if chunks else "")
