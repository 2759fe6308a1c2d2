import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spanline.autops import VA, InvariantError, empty
from spanline.evaluation import bool_abstraction
from spanline.genbench import all_docs, random_va
from spanline.nrobp import (
    NROBP,
    check_read_once,
    count_models,
    models,
    project_nrobp,
    to_nrobp,
    topological_order,
)
from spanline.regex import compile
from spanline.spancore import close, open_


def test_optional_empty_capture():
    p = to_nrobp(compile("x{eps} | eps"), "")
    assert models(p) == {frozenset("x"), frozenset()}
    literals = sorted(lit for _, _, lit in p.edges if lit is not None)
    assert literals == [("x", False), ("x", True)]
    assert check_read_once(p)


def test_forced_capture():
    p = to_nrobp(compile("x{a}"), "a")
    assert models(p) == {frozenset("x")}


def test_empty_spanner_has_no_models():
    p = to_nrobp(empty("a", "x"), "a")
    assert models(p) == set()
    assert count_models(p) == 0


def test_models_of_hand_built_programs():
    free = NROBP(2, 0, 1, ((0, 1, None),), frozenset("x"))
    assert models(free) == {frozenset(), frozenset("x")}
    pos = NROBP(2, 0, 1, ((0, 1, ("x", True)),), frozenset("x"))
    assert models(pos) == {frozenset("x")}
    diamond = NROBP(2, 0, 1, ((0, 1, ("x", True)), (0, 1, ("x", False))), frozenset("x"))
    assert models(diamond) == {frozenset(), frozenset("x")}


def test_read_once_violations():
    twice = NROBP(3, 0, 2, ((0, 1, ("x", True)), (1, 2, ("x", True))), frozenset("x"))
    assert not check_read_once(twice)
    assert check_read_once(NROBP(1, 0, 0, (), frozenset()))


def test_cycle_is_an_invariant_error():
    with pytest.raises(InvariantError):
        topological_order(2, [(0, 1, None), (1, 0, None)])


def test_epsilon_cycles_are_contracted():
    A = VA(frozenset("a"), frozenset("x"), 4, 0, frozenset([3]), (
        (0, None, 1), (1, None, 0), (1, open_("x"), 2), (2, "a", 2), (2, close("x"), 3), (0, "a", 0)))
    for d in all_docs(3, "a"):
        assert models(to_nrobp(A, d)) == bool_abstraction(A, d)


def test_unseen_variables_are_negated():
    A = compile("x{a} | b")
    p = to_nrobp(A, "b")
    assert models(p) == {frozenset()}
    assert any(lit == ("x", False) for _, _, lit in p.edges)


def test_projection():
    p = to_nrobp(compile("x{a} y{b} | x{a} b"), "ab")
    assert models(p) == {frozenset("x"), frozenset("xy")}
    q = project_nrobp(p, {"y"})
    assert models(q) == {frozenset(), frozenset("y")}
    assert check_read_once(q)


def test_dot_export():
    dot = to_nrobp(compile("x{eps} | eps"), "").to_dot()
    assert dot.startswith("digraph") and 'label="x"' in dot and 'label="!x"' in dot


@settings(max_examples=120)
@given(st.integers(0, 10**9), st.sampled_from(all_docs(4)))
def test_models_equal_boolean_abstraction(seed, d):
    A = random_va(seed, max_states=6)
    p = to_nrobp(A, d)
    assert models(p) == bool_abstraction(A, d)
    assert check_read_once(p)
    topological_order(p.n_nodes, p.edges)
    # envelope with |d|+1 so the empty document is covered too
    assert p.size <= 8 * (len(d) + 1) * A.n_states * (len(A.variables) + 1)
