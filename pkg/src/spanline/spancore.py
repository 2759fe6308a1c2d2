"""Documents, spans, mappings, markers and ref-words."""

from __future__ import annotations

import json
from collections.abc import Iterable, Iterator
from collections.abc import Mapping as _AbcMapping
from dataclasses import dataclass
from typing import NamedTuple, Union

DAGGER = "†"


class SpanError(ValueError):
    """A span does not fit the document it is used with."""


class Span(NamedTuple):
    """Half-open interval ``[begin, end)`` over document positions."""

    begin: int
    end: int

    @classmethod
    def of(cls, value: "Span | tuple[int, int] | list[int]") -> "Span":
        if isinstance(value, Span):
            return value
        b, e = value
        if not (isinstance(b, int) and isinstance(e, int)) or b < 0 or b > e:
            raise SpanError(f"not a span: {value!r}")
        return cls(b, e)

    def __len__(self) -> int:  # type: ignore[override]
        return self.end - self.begin

    @property
    def length(self) -> int:
        return self.end - self.begin

    def __str__(self) -> str:
        return f"[{self.begin},{self.end}>"


def spans_of(n: int) -> list[Span]:
    """All spans of a document of length ``n``, ordered by (begin, end)."""
    return [Span(i, j) for i in range(n + 1) for j in range(i, n + 1)]


@dataclass(frozen=True)
class Document:
    """A word over a declared alphabet."""

    text: str
    alphabet: frozenset[str]

    def __post_init__(self) -> None:
        bad = sorted(set(self.text) - self.alphabet)
        if bad:
            raise ValueError(f"letters outside the alphabet: {''.join(bad)!r}")
        for a in self.alphabet:
            if len(a) != 1:
                raise ValueError(f"alphabet symbols must be single characters: {a!r}")

    @classmethod
    def of(cls, text: str, alphabet: Iterable[str] | None = None) -> "Document":
        return cls(text, frozenset(alphabet) if alphabet is not None else frozenset(text))

    def __len__(self) -> int:
        return len(self.text)

    def __str__(self) -> str:
        return self.text


DocLike = Union[str, Document]


def text_of(d: DocLike) -> str:
    return d.text if isinstance(d, Document) else d


def substring(d: DocLike, s: Span) -> str:
    """Return the factor of ``d`` located by ``s``."""
    text = text_of(d)
    s = Span.of(s)
    if s.end > len(text):
        raise SpanError(f"span {s} out of range for document of length {len(text)}")
    return text[s.begin : s.end]


def span_included(inner: Span, outer: Span) -> bool:
    return outer.begin <= inner.begin and outer.end >= inner.end


def covering(s1: Span | None, s2: Span | None) -> Span | None:
    """Smallest span containing both arguments; ``None`` counts as contained in everything."""
    if s1 is None:
        return s2
    if s2 is None:
        return s1
    return Span(min(s1.begin, s2.begin), max(s1.end, s2.end))


# -- variables -------------------------------------------------------------


def dagger(var: str) -> str:
    return var + DAGGER


def is_dagger(var: str) -> bool:
    return var.endswith(DAGGER)


def undagger(var: str) -> str:
    return var[: -len(DAGGER)] if is_dagger(var) else var


# -- mappings --------------------------------------------------------------


class Mapping(_AbcMapping):
    """Immutable partial function from variable names to spans.

    >>> m = Mapping({"x": (1, 2)})
    >>> m["x"], len(m)
    (Span(begin=1, end=2), 1)
    """

    __slots__ = ("_items", "_dict", "_hash")

    def __init__(self, assignments: "_AbcMapping[str, object] | Iterable[tuple[str, object]]" = ()):
        pairs = assignments.items() if isinstance(assignments, _AbcMapping) else assignments
        d = {}
        for var, s in pairs:
            if s is None:
                continue
            d[var] = Span.of(s)  # type: ignore[arg-type]
        self._items = tuple(sorted(d.items()))
        self._dict = dict(self._items)
        self._hash = hash(self._items)

    def __getitem__(self, var: str) -> Span:
        return self._dict[var]

    def __iter__(self) -> Iterator[str]:
        return (v for v, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Mapping):
            return self._items == other._items
        return NotImplemented

    def __lt__(self, other: "Mapping") -> bool:
        return self._items < other._items

    def __repr__(self) -> str:
        inner = ", ".join(f"{v}: {s}" for v, s in self._items)
        return "{" + inner + "}"

    @property
    def domain(self) -> frozenset[str]:
        return frozenset(self._dict)

    def restrict(self, variables: Iterable[str]) -> "Mapping":
        keep = set(variables)
        return Mapping((v, s) for v, s in self._items if v in keep)

    def rename(self, f) -> "Mapping":
        return Mapping((f(v), s) for v, s in self._items)

    def fits(self, n: int) -> bool:
        return all(s.end <= n for _, s in self._items)


def compatible(m1: _AbcMapping, m2: _AbcMapping) -> bool:
    if len(m2) < len(m1):
        m1, m2 = m2, m1
    return all(m2.get(v, s) == s for v, s in m1.items())


def merge(m1: _AbcMapping, m2: _AbcMapping) -> Mapping:
    """Union of two compatible mappings."""
    if not compatible(m1, m2):
        raise ValueError("cannot merge incompatible mappings")
    return Mapping({**m1, **m2})


def dagger_mapping(m: Mapping) -> Mapping:
    return m.rename(dagger)


def join_sets(left: Iterable[Mapping], right: Iterable[Mapping]) -> set[Mapping]:
    right = list(right)
    return {merge(a, b) for a in left for b in right if compatible(a, b)}


# -- markers and ref-words -------------------------------------------------


class Marker(NamedTuple):
    kind: str  # "open" or "close"
    var: str

    @property
    def is_open(self) -> bool:
        return self.kind == "open"

    def __str__(self) -> str:
        return ("⊢" if self.kind == "open" else "⊣") + self.var


def open_(var: str) -> Marker:
    return Marker("open", var)


def close(var: str) -> Marker:
    return Marker("close", var)


def marker_key(m: Marker) -> tuple[int, str, bool]:
    """Canonical order within a marker block: opens first, then by variable.

    A variable and its dagger copy sort next to each other, so renaming every
    variable to its dagger copy keeps blocks sorted.
    """
    return (0 if m.kind == "open" else 1, undagger(m.var), is_dagger(m.var))


def markers_at(m: _AbcMapping, n: int) -> list[list[Marker]]:
    """Markers due at each position ``0..n`` for mapping ``m``."""
    due: list[list[Marker]] = [[] for _ in range(n + 1)]
    for var, s in m.items():
        if s.end > n:
            raise SpanError(f"span {s} of {var} out of range for length {n}")
        due[s.begin].append(open_(var))
        due[s.end].append(close(var))
    for block in due:
        block.sort(key=marker_key)
    return due


def canonical_refword(d: DocLike, m: _AbcMapping) -> list:
    """The ref-word of ``(d, m)`` with every marker block in canonical order."""
    text = text_of(d)
    due = markers_at(m, len(text))
    word: list = []
    for i, block in enumerate(due):
        word.extend(block)
        if i < len(text):
            word.append(text[i])
    return word


def is_valid_refword(word: Iterable) -> bool:
    status: dict[str, int] = {}
    for sym in word:
        if isinstance(sym, Marker):
            st = status.get(sym.var, 0)
            if sym.is_open:
                if st != 0:
                    return False
                status[sym.var] = 1
            else:
                if st != 1:
                    return False
                status[sym.var] = 2
    return all(st == 2 for st in status.values())


def decode_refword(word: Iterable) -> tuple[str, Mapping]:
    """Split a valid ref-word into its document and mapping."""
    letters: list[str] = []
    begins: dict[str, int] = {}
    spans: dict[str, Span] = {}
    for sym in word:
        if isinstance(sym, Marker):
            if sym.is_open:
                if sym.var in begins:
                    raise ValueError(f"variable {sym.var} opened twice")
                begins[sym.var] = len(letters)
            else:
                if sym.var not in begins or sym.var in spans:
                    raise ValueError(f"bad close of {sym.var}")
                spans[sym.var] = Span(begins[sym.var], len(letters))
        else:
            letters.append(sym)
    if set(begins) != set(spans):
        raise ValueError("unclosed variable")
    return "".join(letters), Mapping(spans)


def refwords_of(d: DocLike, m: _AbcMapping):
    """Automaton accepting every valid ref-word that encodes ``(d, m)``.

    At each position the due markers may come in any order, except that a
    variable's open precedes its close.
    """
    from .autops import VA  # local import: autops builds on this module

    text = text_of(d)
    m = Mapping(m)
    due = markers_at(m, len(text))
    ids: dict[tuple[int, frozenset], int] = {}
    transitions = []
    stack = []

    def state(key):
        if key not in ids:
            ids[key] = len(ids)
            stack.append(key)
        return ids[key]

    state((0, frozenset()))
    while stack:
        i, done = key = stack.pop()
        src = ids[key]
        pending = [mk for mk in due[i] if mk not in done]
        for mk in pending:
            if not mk.is_open and m[mk.var].begin == i and open_(mk.var) not in done:
                continue
            transitions.append((src, mk, state((i, done | {mk}))))
        if not pending and i < len(text):
            transitions.append((src, text[i], state((i + 1, frozenset()))))
    final = ids.get((len(text), frozenset(due[len(text)])))
    alphabet = frozenset(text)
    return VA(
        alphabet=alphabet,
        variables=m.domain,
        n_states=len(ids),
        initial=0,
        finals=frozenset([final]) if final is not None else frozenset(),
        transitions=tuple(transitions),
    )


# -- JSON ------------------------------------------------------------------


def span_to_json(s: Span | None):
    return None if s is None else [s.begin, s.end]


def mapping_to_json(m: _AbcMapping, variables: Iterable[str] = ()) -> dict:
    keys = sorted(set(variables) | set(m))
    return {v: span_to_json(m.get(v)) for v in keys}


def mapping_from_json(obj: dict) -> Mapping:
    if not isinstance(obj, dict):
        raise ValueError("mapping must be a JSON object")
    return Mapping({v: (None if s is None else tuple(s)) for v, s in obj.items()})


def mapping_line(m: _AbcMapping, variables: Iterable[str] = ()) -> str:
    return json.dumps(mapping_to_json(m, variables), ensure_ascii=False, separators=(",", ":"))


def sorted_lines(mappings: Iterable[_AbcMapping], variables: Iterable[str] = ()) -> list[str]:
    variables = list(variables)
    return sorted(mapping_line(m, variables) for m in mappings)
