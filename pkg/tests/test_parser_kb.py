from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fallacylab.engine import Atom, Clause, Goal, Int, NotEqual, Struct, TermLess, Var
from fallacylab.errors import ParseError, SealedError, UnknownSchemaError
from fallacylab.kb import KnowledgeBase, records_from_parsed
from fallacylab.labels import FallacyCode
from fallacylab.parser import parse_program, serialize_clause
from fallacylab.seeds import SEED_SOURCES, load_seed


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def test_parse_ground_fact():
    [(clause, comment)] = [tuple(p) for p in parse_program("father(john, mary).")]
    assert clause == Clause(Struct("father", (Atom("john"), Atom("mary"))))
    assert comment is None


def test_parse_rule_with_one_body_literal():
    [(clause, _)] = [tuple(p) for p in parse_program("parent(X,Y) :- father(X,Y).")]
    assert clause.head == Struct("parent", (Var("X"), Var("Y")))
    assert clause.body == (Goal(Struct("father", (Var("X"), Var("Y")))),)


def test_parse_fact_with_trailing_comment():
    text = "hr(highway, maximum_speed_65). % this means highway has a rule"
    [(clause, comment)] = [tuple(p) for p in parse_program(text)]
    assert clause.head == Struct("hr", (Atom("highway"), Atom("maximum_speed_65")))
    assert comment == "this means highway has a rule"


def test_parse_full_literal_zoo():
    text = "h(X) :- b1(X), \\+ b2(X), X \\= a, X @< Y."
    [(clause, _)] = [tuple(p) for p in parse_program(text)]
    assert clause.body == (
        Goal(Struct("b1", (Var("X"),))),
        Goal(Struct("b2", (Var("X"),)), negated=True),
        NotEqual(Var("X"), Atom("a")),
        TermLess(Var("X"), Var("Y")),
    )


def test_parse_digit_leading_atom_and_integer():
    [(clause, _)] = [tuple(p) for p in parse_program("he(brush_teeth, 2_mins, 7).")]
    assert clause.head.args == (Atom("brush_teeth"), Atom("2_mins"), Int(7))


def test_parse_anonymous_variables_are_fresh():
    [(clause, _)] = [tuple(p) for p in parse_program("p(X) :- q(_, _).")]
    a, b = clause.body[0].term.args
    assert a != b and a.name.startswith("_#") and b.name.startswith("_#")


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as err:
        parse_program("father(john mary).")
    assert err.value.line == 1
    assert err.value.column > 0


@pytest.mark.parametrize(
    "bad",
    [
        "fooBar(a).",  # uppercase inside an atom
        "p(a)",  # missing terminator
        "p(a,).",  # dangling comma
        ":- q(a).",  # missing head
        "p(a) :- \\+ (q(a), r(a)).",  # negation over a conjunction
        "p(a) :- 3.",  # integer as a goal
    ],
)
def test_parse_rejects_malformed_input(bad):
    with pytest.raises(ParseError):
        parse_program(bad)


def test_blank_line_blocks_become_groups():
    text = "a(x).\nb(x).\n\nc(y).\n\n\nd(z).\ne(z).\n"
    groups = [p.group_id for p in parse_program(text)]
    assert groups == [0, 0, 1, 2, 2]


def test_comment_only_lines_do_not_split_groups():
    text = "a(x).\n% just a note\nb(x).\n"
    groups = [p.group_id for p in parse_program(text)]
    assert groups == [0, 0]


def test_rules_carry_no_group():
    text = "a(x).\n\nr(X) :- a(X).\n"
    parsed = parse_program(text)
    assert parsed[0].group_id == 0
    assert parsed[1].group_id is None


# ---------------------------------------------------------------------------
# Round trip
# ---------------------------------------------------------------------------

_atoms = st.sampled_from(["a", "b", "foo", "x2", "2_mins", "snake_case_name"])
_terms = st.recursive(
    st.one_of(
        _atoms.map(Atom),
        st.integers(min_value=0, max_value=99).map(Int),
        st.sampled_from(["X", "Y", "Zed", "_Tail"]).map(Var),
    ),
    lambda children: st.builds(
        Struct,
        st.sampled_from(["f", "g", "wrap"]),
        st.lists(children, min_size=1, max_size=3).map(tuple),
    ),
    max_leaves=5,
)
_literals = st.one_of(
    st.builds(Goal, st.builds(Struct, _atoms, st.lists(_terms, min_size=1, max_size=3).map(tuple)), st.booleans()),
    st.builds(NotEqual, _terms, _terms),
    st.builds(TermLess, _terms, _terms),
)
_clauses = st.builds(
    Clause,
    st.builds(Struct, _atoms, st.lists(_terms, min_size=1, max_size=3).map(tuple)),
    st.lists(_literals, min_size=0, max_size=4).map(tuple),
)


@given(st.lists(_clauses, min_size=1, max_size=5))
@settings(max_examples=200, deadline=None)
def test_serialize_parse_round_trip(clauses):
    text = "\n".join(serialize_clause(c) for c in clauses)
    reparsed = [p.clause for p in parse_program(text)]
    assert reparsed == list(clauses)


def test_canonical_round_trip_is_bit_exact():
    kb = load_seed(FallacyCode.AF)
    text = kb.serialize()
    assert KnowledgeBase.from_text(text).serialize() == text


# ---------------------------------------------------------------------------
# Knowledge base
# ---------------------------------------------------------------------------


def test_assertz_then_query():
    kb = KnowledgeBase()
    kb.assertz(parse_program("father(john, mary).")[0].clause)
    kb.seal()
    assert kb.clauses("father", 2)


def test_assertz_on_sealed_base_raises():
    kb = KnowledgeBase().seal()
    with pytest.raises(SealedError):
        kb.assertz(parse_program("f(a).")[0].clause)


def test_non_ground_fact_rejected_at_load():
    kb = KnowledgeBase()
    with pytest.raises(ValueError):
        kb.assertz(Clause(Struct("p", (Var("X"),))))


def test_duplicate_fact_stored_twice():
    kb = KnowledgeBase()
    fact = parse_program("f(a).")[0].clause
    kb.assertz(fact)
    kb.assertz(fact)
    assert len(kb.facts) == 2
    assert len(kb.clauses("f", 1)) == 2


def test_extended_leaves_original_untouched():
    base = load_seed(FallacyCode.IT)
    extra = parse_program("im(x_cause, y_effect).")[0].clause
    bigger = base.extended(clauses=[extra])
    assert len(bigger.facts) == len(base.facts) + 1
    assert len(base.facts) == 2
    assert bigger.sealed


def test_records_from_parsed_keeps_groups_and_comments():
    parsed = parse_program("a(x). % one\n\nb(y). % two\n")
    records = records_from_parsed(parsed)
    assert [(r.comment, r.group_id) for r in records] == [("one", 0), ("two", 1)]


# ---------------------------------------------------------------------------
# Seeds
# ---------------------------------------------------------------------------


def _seed_heads(code: FallacyCode) -> set[str]:
    return {serialize_clause(r.clause) for r in load_seed(code).facts}


def test_seed_af_contents():
    assert _seed_heads(FallacyCode.AF) == {
        "hr(shampoo_bottle, lather_rinse_repeat).",
        "rri(lather_rinse_repeat, wash_once_or_twice).",
        "rui(lather_rinse_repeat, infinite_washing).",
    }


def test_seed_bq_contents():
    assert _seed_heads(FallacyCode.BQ) == {
        "ca(bible_true, bible_word_of_god).",
        "ema(bible_word_of_god, bible_says_god_exists).",
        "emrc(bible_says_god_exists, bible_true).",
    }


def test_seed_ie_contents():
    assert _seed_heads(FallacyCode.IE) == {
        "cc(cycling_forwards, cycling_backwards).",
        "cc(reduce_weight, gain_weight).",
        "im(cycling_forwards, reduce_weight).",
    }


def test_seed_is_single_group_and_commented():
    for code, source in SEED_SOURCES.items():
        kb = load_seed(code)
        assert {r.group_id for r in kb.facts} == {0}, code
        assert all(r.comment for r in kb.facts), code


def test_load_seed_rejects_label_only_codes():
    with pytest.raises(UnknownSchemaError):
        load_seed(FallacyCode.EC)
