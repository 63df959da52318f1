"""Tokenizer, parser and formatter."""

import pytest
from hypothesis import given, settings, strategies as st

from iudex.caselang import (
    Directive,
    LexError,
    ParseError,
    SourceProgram,
    format_clause,
    format_program,
    format_term,
    parse_program,
    parse_term,
    tokenize,
)
from iudex.engine import Builtin, Call, Clause, Naf, clause, fact
from iudex.errors import CaseSyntaxError
from iudex.terms import Atom, Compound, Int, Str, Variable, from_list

from source_snippets import ALL_REFERENCE_SNIPPETS, REFERENCE_FACTS, REFERENCE_SAME_PERSON_RULE


def comp(functor, *args):
    return Compound(functor, tuple(args))


class TestTokenize:
    def test_fact_token_kinds(self):
        kinds = [t.kind for t in tokenize("reliable(thenardier, hi).")]
        assert kinds == ["ident", "(", "ident", ",", "ident", ")", ".", "eof"]

    def test_block_comment_skipped_positions_advance(self):
        tokens = tokenize("/* EVIDENCE 3 */\nfoo.")
        assert [t.kind for t in tokens] == ["ident", ".", "eof"]
        assert (tokens[0].line, tokens[0].column) == (2, 1)

    def test_line_comment(self):
        tokens = tokenize("% a note\nfoo.")
        assert tokens[0].text == "foo"
        assert tokens[0].line == 2

    def test_unterminated_quote_points_at_opening(self):
        with pytest.raises(LexError) as err:
            tokenize("foo(bar).\n'unterminated")
        assert err.value.line == 2
        assert err.value.column == 1

    def test_unterminated_block_comment(self):
        with pytest.raises(LexError) as err:
            tokenize("foo. /* never closed")
        assert (err.value.line, err.value.column) == (1, 6)

    def test_stray_character(self):
        with pytest.raises(LexError):
            tokenize("foo @ bar.")

    def test_quoted_atom_with_escape(self):
        tokens = tokenize("'it''s ok'.")
        assert tokens[0].kind == "qatom"
        assert tokens[0].text == "'it''s ok'"

    def test_operators(self):
        kinds_texts = [(t.kind, t.text) for t in tokenize("X >= 1, Y =< 2, A \\= B, \\+ p")]
        assert ("op", ">=") in kinds_texts
        assert ("op", "=<") in kinds_texts
        assert ("op", "\\=") in kinds_texts
        assert ("\\+", "\\+") in kinds_texts

    def test_lexemes_cover_input(self):
        text = (
            "% case notes\n"
            "p(X) :- q(X), X >= 10. /* inline */ r('a b', \"s\").\n"
        )
        tokens = tokenize(text)
        line_starts = [0]
        for i, ch in enumerate(text):
            if ch == "\n":
                line_starts.append(i + 1)
        last_end = 0
        for tok in tokens:
            if tok.kind == "eof":
                continue
            offset = line_starts[tok.line - 1] + tok.column - 1
            assert text[offset:offset + len(tok.text)] == tok.text
            _assert_gap_is_blank(text[last_end:offset])
            last_end = offset + len(tok.text)
        _assert_gap_is_blank(text[last_end:])


def _assert_gap_is_blank(gap: str) -> None:
    """Between-token material must be whitespace or comments only."""
    i = 0
    while i < len(gap):
        if gap[i].isspace():
            i += 1
        elif gap[i] == "%":
            while i < len(gap) and gap[i] != "\n":
                i += 1
        elif gap.startswith("/*", i):
            end = gap.find("*/", i)
            assert end != -1
            i = end + 2
        else:
            raise AssertionError(f"dropped characters: {gap[i:]!r}")


class TestParseTerms:
    def test_nested_compound_with_quoted_atom(self):
        term = parse_term("born(date(1980,10,17,13,07), valjean, 'reggio calabria')")
        assert term == comp(
            "born",
            comp("date", Int(1980), Int(10), Int(17), Int(13), Int(7)),
            Atom("valjean"),
            Atom("reggio calabria"),
        )

    def test_leading_zero_integers(self):
        assert parse_term("05") == Int(5)

    def test_tuple_term(self):
        term = parse_term("(a, severity(hi), precision(hi))")
        assert term == comp(",", Atom("a"),
                            comp(",", comp("severity", Atom("hi")),
                                 comp("precision", Atom("hi"))))

    def test_single_parens_are_grouping(self):
        assert parse_term("(a)") == Atom("a")

    def test_list_sugar(self):
        assert parse_term("[a, b]") == from_list([Atom("a"), Atom("b")])
        assert parse_term("[]") == Atom("[]")

    def test_string_literal(self):
        assert parse_term('"two words"') == Str("two words")

    def test_quoted_functor(self):
        assert parse_term("'+'(1, 2)") == comp("+", Int(1), Int(2))

    def test_anonymous_variables_distinct(self):
        term = parse_term("p(_, _)")
        assert term.args[0] != term.args[1]

    def test_trailing_input_rejected(self):
        with pytest.raises(CaseSyntaxError):
            parse_term("a b")


class TestParseProgram:
    def test_reference_fact_snippets(self):
        for name, text in REFERENCE_FACTS:
            program = parse_program(text)
            assert len(program.clauses) == 1, name

    def test_drives_snippet_shape(self):
        text = dict(REFERENCE_FACTS)["drives/5"]
        head = parse_program(text).clauses[0].head
        assert head == comp(
            "drives",
            comp("date", Int(2020), Int(5), Int(12), Int(15), Int(3)),
            comp("date", Int(2020), Int(5), Int(12), Int(15), Int(4)),
            Atom("valjean"),
            comp("vehicle", Atom("scooter"), Int(12345)),
            comp("witness", Atom("thenardier")),
        )

    def test_aggregation_rule_snippet(self):
        program = parse_program(REFERENCE_SAME_PERSON_RULE)
        (rule,) = program.clauses
        assert rule.head == comp("same_person", Variable("X"), Variable("Y"),
                                 Variable("Evidences"))
        kinds = [type(lit) for lit in rule.body]
        assert kinds == [Call, Builtin, Builtin, Builtin]
        assert rule.body[0].goal.functor == "setof"
        assert rule.body[2].name == ">"

    def test_every_reference_snippet_parses(self):
        for text in ALL_REFERENCE_SNIPPETS:
            parse_program(text)

    def test_missing_final_dot(self):
        with pytest.raises(CaseSyntaxError) as err:
            parse_program("p(X) :- q(X)")
        (problem,) = err.value.errors
        assert problem.expected == "."

    def test_error_recovery_collects_all_errors(self):
        text = "p(. \nq(a).\nr(].\ns(b)."
        with pytest.raises(CaseSyntaxError) as err:
            parse_program(text)
        assert len(err.value.errors) == 2
        assert [e.line for e in err.value.errors] == [1, 3]

    def test_naf_literal(self):
        program = parse_program("p(X) :- q(X), \\+ r(X).")
        assert isinstance(program.clauses[0].body[1], Naf)

    def test_infix_body_literals(self):
        program = parse_program("p(X) :- X > 1, X =< 5, X \\= 3, Y is '+'(X, 1).")
        names = [lit.name for lit in program.clauses[0].body]
        assert names == [">", "=<", "\\=", "is"]

    def test_variable_head_rejected(self):
        with pytest.raises(CaseSyntaxError):
            parse_program("X :- p(X).")

    def test_empty_program(self):
        assert parse_program("").clauses == ()
        assert parse_program("% only comments\n").clauses == ()


class TestDirectives:
    def test_tag_scoping(self):
        program = parse_program(
            "base(x).\n"
            "tag(e1).\n"
            "one(a).\n"
            "two(b).\n"
            "end_tag.\n"
            "tag(e2).\n"
            "three(c).\n"
        )
        tags = [c.tag for c in program.clauses]
        assert tags == [None, "e1", "e1", "e2"]
        assert program.tags == ("e1", "e2")

    def test_tag_region_closed_by_next_tag(self):
        program = parse_program("tag(e1). a. tag(e2). b.")
        assert [c.tag for c in program.clauses] == ["e1", "e2"]

    def test_duplicate_tag_rejected(self):
        with pytest.raises(CaseSyntaxError) as err:
            parse_program("tag(e1). a. end_tag. tag(e1). b.")
        assert "duplicate" in err.value.errors[0].message

    def test_policy_directives_collected(self):
        program = parse_program(
            "policy(min_evidence_count, 3).\n"
            "policy(require_severe_precise, false).\n"
        )
        assert program.policy_settings == {
            "min_evidence_count": 3,
            "require_severe_precise": False,
        }

    def test_unknown_policy_key_rejected(self):
        with pytest.raises(CaseSyntaxError):
            parse_program("policy(verdict_bias, 1).")

    def test_policy_value_type_checked(self):
        with pytest.raises(CaseSyntaxError):
            parse_program("policy(min_evidence_count, several).")
        with pytest.raises(CaseSyntaxError):
            parse_program("policy(require_severe_precise, 1).")

    def test_directive_cannot_head_a_rule(self):
        with pytest.raises(CaseSyntaxError):
            parse_program("tag(e1) :- p.")


class TestFormat:
    def test_quoting_minimal(self):
        assert format_term(Atom("reggio calabria")) == "'reggio calabria'"
        assert format_term(Atom("valjean")) == "valjean"
        assert format_term(Atom("it's")) == "'it''s'"
        assert format_term(Atom("Upper")) == "'Upper'"
        assert format_term(Int(12345)) == "12345"

    def test_compound_spacing(self):
        term = parse_term("vehicle(scooter,12345)")
        assert format_term(term) == "vehicle(scooter, 12345)"

    def test_tuple_and_list_formatting(self):
        assert format_term(parse_term("(a, b, c)")) == "(a, b, c)"
        assert format_term(parse_term("[a, b]")) == "[a, b]"

    def test_rule_formatting(self):
        cl = clause(comp("p", Variable("X")),
                    comp("q", Variable("X")),
                    comp(">", Variable("X"), Int(1)))
        assert format_clause(cl) == "p(X) :-\n    q(X),\n    X > 1."

    def test_term_round_trip(self):
        for text in ["f(X, 'a b', [1, 2], (x, y))", "'[]'", "g(\"str\")"]:
            term = parse_term(text)
            assert parse_term(format_term(term)) == term


def _program_fingerprint(program: SourceProgram):
    return (
        tuple((c.head, c.body, c.tag) for c in program.clauses),
        tuple((d.kind, d.tag_id, d.policy_key, d.policy_value) for d in program.directives),
    )


class TestRoundTrip:
    @pytest.mark.parametrize("name", ["valjean.case", "rules_art192.case"])
    def test_shipped_files_are_fixpoints(self, name):
        from importlib import resources

        text = resources.files("iudex.data").joinpath(name).read_text("utf-8")
        once = parse_program(text)
        rendered = format_program(once)
        twice = parse_program(rendered)
        assert _program_fingerprint(once) == _program_fingerprint(twice)
        assert format_program(twice) == rendered


class TestPositionAccuracy:
    def test_single_token_deletions_report_early_errors(self):
        """Errors land at or before the deletion's successor token.

        Deleted closing delimiters are the one structural exception: the
        enclosing arg list legally swallows everything up to the clause
        terminator, so the earliest detectable position is that clause's
        final dot.
        """
        from importlib import resources

        text = resources.files("iudex.data").joinpath("valjean.case").read_text("utf-8")
        tokens = tokenize(text)
        line_starts = [0]
        for i, ch in enumerate(text):
            if ch == "\n":
                line_starts.append(i + 1)
        real = [t for t in tokens if t.kind != "eof"]
        for idx, tok in enumerate(real):
            offset = line_starts[tok.line - 1] + tok.column - 1
            # a single space keeps the neighbours from merging into one lexeme
            mutated = text[:offset] + " " + text[offset + len(tok.text):]
            try:
                parse_program(mutated)
                continue  # some deletions still form a valid program
            except CaseSyntaxError as exc:
                first = min((e.line, e.column) for e in exc.errors)
            try:
                new_tokens = [t for t in tokenize(mutated) if t.kind != "eof"]
            except LexError:
                continue
            successor = new_tokens[idx] if idx < len(new_tokens) else None
            if successor is None:
                continue
            bound = (successor.line, successor.column)
            if tok.kind in (")", "]", "["):
                dots = [(t.line, t.column) for t in new_tokens[idx:] if t.kind == "."]
                if dots:
                    bound = max(bound, dots[0])
            assert first <= bound, (
                f"deleting {tok.text!r} at {(tok.line, tok.column)}: error at {first} "
                f"reported after {bound}"
            )


# ---------------------------------------------------------------------------
# Generated-program round trip

symbols = st.sampled_from(["p", "q", "foo", "reggio calabria", "it's", "järn"])
gen_atoms = symbols.map(Atom)
gen_vars = st.sampled_from(["X", "Y", "Zed", "_G9"]).map(Variable)
gen_leaf = st.one_of(gen_atoms, st.integers(0, 99).map(Int), gen_vars,
                     st.sampled_from(["a b", 'say "hi"']).map(Str))


def gen_terms():
    return st.recursive(
        gen_leaf,
        lambda children: st.one_of(
            st.builds(lambda f, args: Compound(f, tuple(args)),
                      st.sampled_from(["f", "g", "date", "+"]),
                      st.lists(children, min_size=1, max_size=3)),
            st.lists(children, min_size=0, max_size=3).map(from_list),
            st.builds(lambda a, b: Compound(",", (a, b)), children, children),
        ),
        max_leaves=6,
    )


gen_heads = st.builds(lambda f, args: Compound(f, tuple(args)),
                      st.sampled_from(["p", "q", "rule head"]),
                      st.lists(gen_terms(), min_size=1, max_size=3))

gen_body_literal = st.one_of(
    gen_heads,
    st.builds(lambda t: Compound("\\+", (t,)), gen_heads),
    st.builds(lambda a, b: Compound(">", (a, b)), gen_terms(), gen_terms()),
    st.builds(lambda a, b: Compound("is", (a, b)), gen_terms(), gen_terms()),
)

gen_clauses = st.builds(
    lambda head, body: clause(head, *body),
    gen_heads,
    st.lists(gen_body_literal, min_size=0, max_size=3),
)


@settings(max_examples=120, deadline=None)
@given(st.lists(gen_clauses, min_size=0, max_size=5))
def test_generated_program_round_trip(clauses):
    from iudex.caselang import ClauseItem

    program = SourceProgram(tuple(ClauseItem(c, 1, 1) for c in clauses))
    rendered = format_program(program)
    reparsed = parse_program(rendered)
    assert _program_fingerprint(reparsed) == _program_fingerprint(program)
    assert format_program(reparsed) == rendered
