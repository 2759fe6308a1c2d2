import itertools
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from spanline.evaluation import evaluate
from spanline.spancore import (
    DAGGER,
    Document,
    Mapping,
    Span,
    SpanError,
    canonical_refword,
    close,
    compatible,
    covering,
    dagger,
    dagger_mapping,
    decode_refword,
    is_valid_refword,
    mapping_from_json,
    mapping_line,
    mapping_to_json,
    marker_key,
    merge,
    open_,
    refwords_of,
    span_included,
    spans_of,
    substring,
    undagger,
)


def accepted_words(A, max_len=12):
    """Every word accepted by an acyclic automaton."""
    out = set()
    stack = [(A.initial, ())]
    while stack:
        q, w = stack.pop()
        if q in A.finals:
            out.add(w)
        if len(w) < max_len:
            for l, r in A.out[q]:
                stack.append((r, w + (l,)))
    return out


# -- spans and substrings ---------------------------------------------------------


def test_substring_examples():
    assert substring("qwertyqwerty", Span(2, 5)) == "ert"
    assert substring("abc", Span(1, 1)) == ""
    assert substring("aba", Span(0, 3)) == "aba"


def test_substring_out_of_range():
    with pytest.raises(SpanError):
        substring("ab", Span(1, 3))


def test_span_rejects_reversed_bounds():
    with pytest.raises(SpanError):
        Span.of((3, 1))
    with pytest.raises(SpanError):
        Span.of((-1, 2))


@pytest.mark.parametrize("n", range(7))
def test_substring_lengths(n):
    d = "ab" * n
    d = d[:n]
    assert substring(d, Span(0, n)) == d
    for s in spans_of(n):
        assert len(substring(d, s)) == s.length


def test_span_included_examples():
    assert span_included(Span(1, 2), Span(0, 2))
    assert span_included(Span(0, 2), Span(0, 2))
    assert not span_included(Span(1, 3), Span(2, 5))


@pytest.mark.parametrize("n", range(7))
def test_span_inclusion_is_partial_order(n):
    spans = spans_of(n)
    for a in spans:
        assert span_included(a, a)
        for b in spans:
            if span_included(a, b) and span_included(b, a):
                assert a == b
            for c in spans:
                if span_included(a, b) and span_included(b, c):
                    assert span_included(a, c)


def test_covering():
    assert covering(None, Span(1, 2)) == Span(1, 2)
    assert covering(Span(0, 0), Span(2, 3)) == Span(0, 3)
    assert covering(None, None) is None


def test_document_validates_alphabet():
    assert Document.of("abba").alphabet == frozenset("ab")
    with pytest.raises(ValueError):
        Document("abc", frozenset("ab"))


# -- mappings ------------------------------------------------------------------------


def test_compatible_examples():
    assert compatible(Mapping({"x": (1, 2)}), Mapping({"x": (1, 2), "y": (0, 1)}))
    assert not compatible(Mapping({"x": (1, 2)}), Mapping({"x": (1, 3)}))
    assert compatible(Mapping(), Mapping({"z": (0, 4)}))


spans = st.builds(lambda a, b: Span(min(a, b), max(a, b)), st.integers(0, 5), st.integers(0, 5))
mappings = st.dictionaries(st.sampled_from("xyz"), spans).map(Mapping)


@given(mappings, mappings)
def test_compatible_symmetric_and_reflexive(m1, m2):
    assert compatible(m1, m1)
    assert compatible(m1, m2) == compatible(m2, m1)
    if compatible(m1, m2):
        merged = merge(m1, m2)
        assert merged.restrict(m1.domain) == m1 and merged.restrict(m2.domain) == m2


def test_mapping_drops_unassigned_and_hashes():
    m = Mapping({"x": (0, 1), "y": None})
    assert m.domain == {"x"}
    assert m == Mapping({"x": Span(0, 1)})
    assert len({m, Mapping({"x": (0, 1)})}) == 1


def test_dagger_names():
    assert dagger("x") == "x" + DAGGER
    assert undagger(dagger("x")) == "x"
    assert dagger_mapping(Mapping({"x": (0, 1)})) == Mapping({dagger("x"): (0, 1)})


def test_mapping_json_round_trip():
    m = Mapping({"y": (1, 2), "x": (0, 0)})
    obj = mapping_to_json(m, ["z"])
    assert obj == {"x": [0, 0], "y": [1, 2], "z": None}
    assert list(obj) == ["x", "y", "z"]
    assert mapping_from_json(obj) == m
    assert json.loads(mapping_line(m)) == {"x": [0, 0], "y": [1, 2]}


# -- markers and ref-words ------------------------------------------------------------


def test_canonical_marker_order():
    keys = sorted([close("a"), open_("b"), open_("a"), close(dagger("a"))], key=marker_key)
    assert keys == [open_("a"), open_("b"), close("a"), close(dagger("a"))]


def test_refwords_of_empty_span():
    R = refwords_of("", Mapping({"x": (0, 0)}))
    assert accepted_words(R) == {(open_("x"), close("x"))}


def test_refwords_of_permutations():
    R = refwords_of("a", Mapping({"x": (0, 1), "y": (0, 1)}))
    got = accepted_words(R)
    opens = [(open_("x"), open_("y")), (open_("y"), open_("x"))]
    closes = [(close("x"), close("y")), (close("y"), close("x"))]
    assert got == {o + ("a",) + c for o in opens for c in closes}


def test_refwords_of_no_markers():
    assert accepted_words(refwords_of("a", Mapping())) == {("a",)}


def all_refwords(text, m):
    """Brute force: every ordering of the due markers at each position, filtered by validity."""
    due = {}
    for v, s in m.items():
        due.setdefault(s.begin, []).append(open_(v))
        due.setdefault(s.end, []).append(close(v))
    blocks = [list(itertools.permutations(due.get(i, []))) for i in range(len(text) + 1)]
    out = set()
    for choice in itertools.product(*blocks):
        w = []
        for i, block in enumerate(choice):
            w.extend(block)
            if i < len(text):
                w.append(text[i])
        if is_valid_refword(w):
            out.add(tuple(w))
    return out


@given(st.text("ab", max_size=3), st.data())
def test_refwords_of_matches_brute_force(text, data):
    n = len(text)
    options = [None, *spans_of(n)]
    m = Mapping({v: data.draw(st.sampled_from(options)) for v in "xy"})
    assert accepted_words(refwords_of(text, m)) == all_refwords(text, m)


@given(st.text("ab", max_size=4), st.data())
def test_refword_round_trip(text, data):
    options = [None, *spans_of(len(text))]
    m = Mapping({v: data.draw(st.sampled_from(options)) for v in "xyz"})
    word = canonical_refword(text, m)
    assert is_valid_refword(word)
    assert decode_refword(word) == (text, m)
    R = refwords_of(text, m)
    assert tuple(word) in accepted_words(R, max_len=len(word))
    assert evaluate(R, text) == {m}


def test_invalid_refwords():
    assert not is_valid_refword([close("x"), open_("x")])
    assert not is_valid_refword([open_("x"), "a"])
    assert not is_valid_refword([open_("x"), close("x"), open_("x"), close("x")])
