"""Formula language: parser, printer, fragments, schemas, telescopes."""

import pytest
from hypothesis import given, settings, strategies as st

from subint.formula import (
    Assignment, Fragment, FragmentError, ParseError, Schema,
    and_, atom, bot, imp, in_fragment, instantiate, match_schema, metavar,
    or_, parse, parse_schema, print_formula, subformulas, telescope, top,
)

p, q, r = atom("p"), atom("q"), atom("r")


def test_interning_gives_identity():
    assert imp(p, q) is imp(p, q)
    assert and_(p, q) is not and_(q, p)
    assert imp(p, q).size == 1
    assert imp(p, imp(q, p)).size == 2


def test_parse_right_associative_arrow():
    assert parse("p->q->p", Fragment.IMP) is imp(p, imp(q, p))


def test_parse_and_binds_tighter_than_arrow():
    assert parse("p & q -> p", Fragment.IMP_AND) is imp(and_(p, q), p)


def test_parse_or_in_imp_fragment_is_rejected():
    with pytest.raises(FragmentError) as e:
        parse("p | q", Fragment.IMP)
    assert e.value.connective == "|"


def test_bot_only_in_full_fragment():
    assert not in_fragment(imp(bot, p), Fragment.IMP_AND)
    assert in_fragment(imp(bot, p), Fragment.FULL)
    assert in_fragment(imp(top, p), Fragment.IMP)


def test_parse_unicode_aliases():
    assert parse("p ∧ q → ⊥") is imp(and_(p, q), bot)
    assert parse("⊤ ∨ p") is or_(top, p)


def test_parse_errors_carry_position():
    with pytest.raises(ParseError):
        parse("p -> ")
    with pytest.raises(ParseError):
        parse("p q")
    with pytest.raises(ParseError):
        parse("(p -> q")
    with pytest.raises(ParseError):
        parse("p -> Q")  # metavariable outside schema context


def test_print_minimal_parens():
    assert print_formula(imp(p, imp(q, p))) == "p -> q -> p"
    assert print_formula(and_(p, q)) == "p & q"
    assert print_formula(imp(imp(p, q), r)) == "(p -> q) -> r"
    assert print_formula(or_(and_(p, q), r)) == "p & q | r"
    assert print_formula(and_(p, or_(q, r))) == "p & (q | r)"
    assert print_formula(and_(and_(p, q), r)) == "p & q & r"
    assert print_formula(and_(p, and_(q, r))) == "p & (q & r)"


def _formulas(max_leaves=6, atoms=("p", "q", "r")):
    leaf = st.one_of(
        st.sampled_from([atom(a) for a in atoms]),
        st.just(top), st.just(bot))
    return st.recursive(
        leaf,
        lambda sub: st.builds(imp, sub, sub) | st.builds(and_, sub, sub)
        | st.builds(or_, sub, sub),
        max_leaves=max_leaves)


@given(_formulas())
@settings(max_examples=300)
def test_parse_print_roundtrip(f):
    assert parse(print_formula(f)) is f


@given(_formulas())
@settings(max_examples=100)
def test_print_parse_canonicalizes_idempotently(f):
    text = print_formula(f)
    assert print_formula(parse(text)) == text


def test_telescope():
    assert telescope([], q) is q
    assert telescope([p], q) is imp(p, q)
    assert telescope([p, q], r) is imp(p, imp(q, r))
    assert telescope([p, q], r).size >= 2


def test_subformulas():
    f = imp(and_(p, q), p)
    assert subformulas(f) == {f, and_(p, q), p, q}


# -- schemas ---------------------------------------------------------------

A, B, C = metavar("A"), metavar("B"), metavar("C")
identity = Schema(imp(A, A))
tele_bc = Schema(imp(B, C), telescoped=True)


def test_instantiate_identity_schema():
    got = instantiate(identity, Assignment.of({"A": imp(p, q)}))
    assert got is imp(imp(p, q), imp(p, q))


def test_instantiate_telescoped():
    got = instantiate(tele_bc, Assignment.of({"B": q, "C": r}, (p,)))
    assert got is imp(p, imp(q, r))


def test_instantiate_conjunctive_detachment():
    s = Schema(parse_schema("A & (A -> B) -> B"))
    got = instantiate(s, Assignment.of({"A": p, "B": q}))
    assert got is imp(and_(p, imp(p, q)), q)


def test_instantiate_missing_binding():
    with pytest.raises(KeyError):
        instantiate(identity, Assignment.of({}))


def test_match_identity():
    f = imp(imp(p, q), imp(p, q))
    assert match_schema(identity, f) == [Assignment.of({"A": imp(p, q)})]
    assert match_schema(identity, imp(p, q)) == []


def test_match_telescoped_all_arities():
    f = imp(p, imp(q, r))
    got = match_schema(tele_bc, f)
    assert got == [
        Assignment.of({"B": p, "C": imp(q, r)}),
        Assignment.of({"B": q, "C": r}, (p,)),
    ]


def test_letter_restricted_metavar():
    s = Schema(parse_schema("P -> top -> P"), letter_vars=frozenset({"P"}))
    assert match_schema(s, imp(p, imp(top, p)))
    assert match_schema(s, imp(imp(p, q), imp(top, imp(p, q)))) == []
    with pytest.raises(ValueError):
        instantiate(s, Assignment.of({"P": imp(p, q)}))


@given(_formulas(max_leaves=4, atoms=("p", "q")))
@settings(max_examples=200)
def test_match_is_complete_for_instantiation(f):
    # any instance of a schema is recovered by matching it
    s = Schema(parse_schema("A -> B -> A"))
    inst = instantiate(s, Assignment.of({"A": f, "B": imp(f, f)}))
    assert Assignment.of({"A": f, "B": imp(f, f)}) in match_schema(s, inst)


@given(_formulas(max_leaves=4, atoms=("p", "q")),
       st.lists(_formulas(max_leaves=3, atoms=("p", "q")), max_size=3))
@settings(max_examples=200)
def test_telescoped_match_completeness(body, args):
    inst = instantiate(tele_bc, Assignment.of({"B": body, "C": body},
                                              tuple(args)))
    expect = Assignment.of({"B": body, "C": body}, tuple(args))
    assert expect in match_schema(tele_bc, inst)
