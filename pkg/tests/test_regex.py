import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import formula_mappings, random_formula
from spanline.autops import check_sequential
from spanline.evaluation import evaluate
from spanline.genbench import all_docs
from spanline.regex import (
    Alt,
    Capture,
    Concat,
    Empty,
    Epsilon,
    Letter,
    NonSequentialFormula,
    RegexSyntaxError,
    Star,
    UnknownLetter,
    compile,
    escape,
    parse,
    sigma_star,
    size,
    to_text,
    variables_of,
)
from spanline.spancore import DAGGER, Mapping

DOCS4 = all_docs(4)


def test_parse_capture_alternation():
    e = parse("x{a*} b a* | a* b x{a*}")
    a_star = Star(Letter("a"))
    left = Concat(Concat(Capture("x", a_star), Letter("b")), a_star)
    right = Concat(Concat(a_star, Letter("b")), Capture("x", a_star))
    assert e == Alt(left, right)


def test_parse_glued_form_matches_spaced_form():
    assert parse("x{a*}ba*|a*bx{a*}") == parse("x{a*} b a* | a* b x{a*}")


def test_parse_keywords():
    assert parse("eps") == Epsilon()
    assert parse("empty") == Empty()
    assert parse("ε") == Epsilon()


def test_parse_unbalanced_reports_offset():
    with pytest.raises(RegexSyntaxError) as err:
        parse("x{")
    assert err.value.offset == 2


@pytest.mark.parametrize("src", ["(a", "a)", "|", "*", "a|", "x!", "a\\"])
def test_parse_errors(src):
    with pytest.raises(RegexSyntaxError):
        parse(src)


def test_unknown_letter():
    with pytest.raises(UnknownLetter):
        parse("x{c}", alphabet="ab")


def test_dagger_variables():
    e = parse("x!{a} y{b}")
    assert variables_of(e) == {"x" + DAGGER, "y"}
    assert parse("x†{a}") == parse("x!{a}")


def test_multi_letter_names_need_a_boundary():
    assert variables_of(parse("x{a} yz{b}")) == {"x", "yz"}
    assert variables_of(parse("x{a}yz{b}")) == {"x", "z"}


def test_escapes():
    e = parse(escape("a|*"))
    assert e == Concat(Concat(Letter("a"), Letter("|")), Letter("*"))
    assert evaluate(compile(e), "a|*") == {Mapping()}


@given(st.integers(0, 10_000))
def test_print_parse_round_trip(seed):
    e = random_formula(random.Random(seed), depth=4)
    assert parse(to_text(e)) == e


# -- compilation ----------------------------------------------------------------


def test_compile_example_on_aba():
    A = compile("x{a*} b a* | a* b x{a*}")
    assert evaluate(A, "aba") == {Mapping({"x": (0, 1)}), Mapping({"x": (2, 3)})}


def test_compile_eps():
    assert evaluate(compile("eps"), "") == {Mapping()}
    assert evaluate(compile("eps"), "a") == set()


def test_compile_rejects_repeated_capture():
    with pytest.raises(NonSequentialFormula):
        compile("(x{a})*")
    with pytest.raises(NonSequentialFormula):
        compile("x{a} x{b}")


def test_schemaless_capture_accepted():
    A = compile("x{a} | a")
    assert evaluate(A, "a") == {Mapping({"x": (0, 1)}), Mapping()}


def test_compile_output_is_epsilon_free_and_trimmed():
    A = compile("(x{a} | eps) b*")
    assert not A.has_epsilon
    assert A.is_trimmed
    assert check_sequential(A)[0]


def test_sigma_star():
    A = compile(sigma_star("ab"))
    assert all(evaluate(A, d) == {Mapping()} for d in DOCS4)
    assert sigma_star([]) == "eps"


def compiled_or_none(e):
    try:
        return compile(e)
    except NonSequentialFormula:
        return None


def test_oracle_equivalence_sweep():
    """Compiled automata agree with the structural semantics on every document up to length 4."""
    rng = random.Random(7)
    checked = 0
    while checked < 300:
        e = random_formula(rng, depth=4)
        if size(e) > 10 or len(variables_of(e)) > 3:
            continue
        A = compiled_or_none(e)
        if A is None:
            continue
        assert check_sequential(A)[0]
        for d in DOCS4:
            assert evaluate(A, d) == formula_mappings(e, d), (to_text(e), d)
        checked += 1


@settings(max_examples=60)
@given(st.integers(0, 10**6))
def test_oracle_equivalence_property(seed):
    e = random_formula(random.Random(seed), depth=3)
    A = compiled_or_none(e)
    if A is None:
        return
    for d in all_docs(3):
        assert evaluate(A, d) == formula_mappings(e, d)
