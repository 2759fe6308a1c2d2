import json
import random

import pytest

from oracles import LEQ
from spanline.domination import (
    DominationDomainError,
    NativeRule,
    RegularRule,
    VariableWiseRule,
    all_mappings,
    builtin_rule,
    comparator,
    dominates,
    instantiate_variable_wise,
    load_rule,
    native_rule,
    template_text,
    validate_rule,
)
from spanline.evaluation import evaluate
from spanline.genbench import all_docs
from spanline.regex import compile
from spanline.spancore import Mapping, Span, dagger

REGULAR = ("self", "varinc", "spaninc", "ltr")
DOC10 = "ab" * 5


def test_self_instantiated_on_one_variable():
    D = instantiate_variable_wise(builtin_rule("self").template, {"y"})
    assert D.variables <= {"y", dagger("y")}
    got = evaluate(D, "a")
    assert Mapping() in got
    for s in [Span(0, 0), Span(0, 1), Span(1, 1)]:
        assert Mapping({"y": s, dagger("y"): s}) in got
    assert all(m.get("y") == m.get(dagger("y")) for m in got)


def test_varinc_instantiated_on_two_variables():
    rule = builtin_rule("varinc").instantiate({"x", "y"})
    assert isinstance(rule, RegularRule)
    m1 = Mapping({"y": (0, 0)})
    m2 = Mapping({"x": (0, 0), "y": (0, 0)})
    assert dominates(rule, "", m1, m2)
    assert not dominates(rule, "", m2, m1)


def test_spaninc_on_aa():
    rule = builtin_rule("spaninc").on({"x"})
    assert dominates(rule, "aa", Mapping({"x": (1, 2)}), Mapping({"x": (0, 2)}))
    assert not dominates(rule, "aa", Mapping({"x": (0, 2)}), Mapping({"x": (1, 2)}))


def test_varinc_figure_row():
    rule = builtin_rule("varinc")
    assert dominates(rule, DOC10, Mapping({"y": (2, 3)}), Mapping({"x": (1, 2), "y": (2, 3)}))


def test_spanlen_example():
    m1 = Mapping({"x": (1, 2), "y": (2, 3)})
    m2 = Mapping({"x": (0, 2), "y": (2, 3)})
    assert dominates(native_rule("spanlen"), DOC10, m1, m2)


def test_spanlen_equal_lengths_incomparable():
    rule = native_rule("spanlen")
    a, b = Mapping({"x": (0, 1)}), Mapping({"x": (1, 2)})
    assert not dominates(rule, "aa", a, b) and not dominates(rule, "aa", b, a)


@pytest.mark.parametrize("name", [*REGULAR, "spanlen"])
def test_reflexive_on_samples(name):
    rule = builtin_rule(name)
    for m in all_mappings("xy", 2):
        assert dominates(rule, "ab", m, m)


def test_domain_error():
    rule = builtin_rule("varinc").on({"x"})
    with pytest.raises(DominationDomainError):
        dominates(rule, "a", Mapping({"y": (0, 1)}), Mapping())
    with pytest.raises(DominationDomainError):
        dominates(native_rule("ltr").on({"x"}), "a", Mapping({"z": (0, 1)}), Mapping({"z": (0, 1)}))


def test_letters_outside_rule_alphabet():
    rule = builtin_rule("spaninc", "a").instantiate({"x"})
    with pytest.raises(ValueError):
        dominates(rule, "b", Mapping(), Mapping())


def test_template_rejects_foreign_variables():
    with pytest.raises(ValueError):
        VariableWiseRule(compile("y{a}"))
    with pytest.raises(ValueError):
        RegularRule(compile("y{a}"), frozenset("x"))


def test_template_texts_mention_both_copies():
    for name in REGULAR:
        text = template_text(name)
        assert "x!" in text and "x{" in text
    with pytest.raises(KeyError):
        template_text("spanlen")


# -- agreement between regular templates, native comparators and oracles ----------------


@pytest.mark.parametrize("name", REGULAR)
@pytest.mark.parametrize("d", all_docs(3))
def test_native_agrees_with_template_two_variables(name, d):
    template = comparator(builtin_rule(name).on({"x", "y"}), d)
    native = comparator(native_rule(name).on({"x", "y"}), d)
    universe = all_mappings("xy", len(d))
    for m1 in universe:
        for m2 in universe:
            expected = LEQ[name](m1, m2)
            assert template(m1, m2) == expected
            assert native(m1, m2) == expected


@pytest.mark.parametrize("name", REGULAR)
@pytest.mark.parametrize("d", all_docs(4))
def test_native_agrees_with_template_one_variable(name, d):
    template = comparator(builtin_rule(name).on({"x"}), d)
    native = comparator(native_rule(name).on({"x"}), d)
    universe = all_mappings("x", len(d))
    for m1 in universe:
        for m2 in universe:
            assert template(m1, m2) == native(m1, m2) == LEQ[name](m1, m2)


@pytest.mark.parametrize("name", REGULAR)
def test_dominates_membership_path(name):
    """The ref-word membership test agrees with the comparator on sampled pairs."""
    rng = random.Random(name)
    for d in ["", "a", "ab", "abb"]:
        explicit = builtin_rule(name).instantiate({"x", "y"})
        fast = comparator(explicit, d)
        universe = all_mappings("xy", len(d))
        for _ in range(150):
            m1, m2 = rng.choice(universe), rng.choice(universe)
            if rng.random() < 0.3:
                m2 = m1
            assert dominates(explicit, d, m1, m2) == fast(m1, m2) == LEQ[name](m1, m2)


@pytest.mark.parametrize("d", all_docs(4))
def test_ltr_pairs_share_start(d):
    for m1 in all_mappings("x", len(d)):
        for m2 in all_mappings("x", len(d)):
            if m1 != m2 and dominates(builtin_rule("ltr"), d, m1, m2):
                assert m1["x"].begin == m2["x"].begin and m2["x"].length >= m1["x"].length


# -- validation -----------------------------------------------------------------------------


def test_validate_spaninc_on_aa():
    report = validate_rule(builtin_rule("spaninc"), "aa")
    assert report.ok and not report.violations


def test_validate_reports_missing_reflexivity():
    rule = VariableWiseRule.from_regex("x{(a|b)*} (a|b)* x!{(a|b)*} | (a|b)*", alphabet="ab")
    report = validate_rule(rule, "a")
    assert not report.reflexive
    assert any(v.startswith("reflexivity") for v in report.violations)


@pytest.mark.parametrize("d", all_docs(4))
def test_self_validates_as_identity(d):
    rule = builtin_rule("self")
    report = validate_rule(rule, d)
    assert report.ok
    cmp = comparator(rule.on({"x"}), d)
    universe = all_mappings("x", len(d))
    assert all(cmp(a, b) == (a == b) for a in universe for b in universe)
    assert validate_rule(rule, d, mode="relation").checked == 0


@pytest.mark.parametrize("name", REGULAR)
@pytest.mark.parametrize("d", all_docs(3))
def test_builtins_validate_on_small_documents(name, d):
    assert validate_rule(builtin_rule(name), d).ok


@pytest.mark.parametrize("name", REGULAR)
@pytest.mark.parametrize("d", ["", "a", "ab"])
def test_variable_wise_product_is_partial_order(name, d):
    assert validate_rule(builtin_rule(name), d, variables={"x", "y"}).ok


def test_validate_relation_mode_finds_antisymmetry_failure():
    both = NativeRule("same-length", lambda t, a, b: a.domain == b.domain and all(
        a[v].length == b[v].length for v in a))
    report = validate_rule(both, "aa", mode="relation")
    assert report.reflexive and report.transitive and not report.antisymmetric


def test_validate_unknown_mode():
    with pytest.raises(ValueError):
        validate_rule(builtin_rule("self"), "a", mode="sampled")


# -- rule loading ------------------------------------------------------------------------------


def test_load_builtin_names():
    assert isinstance(load_rule("varinc"), VariableWiseRule)
    assert isinstance(load_rule("spanlen"), NativeRule)
    with pytest.raises(ValueError):
        load_rule("nonsense")


def test_load_rule_files(tmp_path):
    headed = tmp_path / "inc.rule"
    headed.write_text("# variable-wise\n" + template_text("spaninc") + "\n")
    rule = load_rule(f"file:{headed}")
    assert isinstance(rule, VariableWiseRule)
    assert dominates(rule, "aa", Mapping({"x": (1, 2)}), Mapping({"x": (0, 2)}))

    explicit = tmp_path / "pair.json"
    va = builtin_rule("self").instantiate({"x"}).va
    explicit.write_text(json.dumps({"kind": "explicit", "va": va.to_json()}))
    rule = load_rule(f"file:{explicit}")
    assert isinstance(rule, RegularRule) and rule.variables == {"x"}

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"kind": "other"}))
    with pytest.raises(ValueError):
        load_rule(f"file:{bad}")
