"""Evaluating a sequential automaton on a document."""

from __future__ import annotations

from collections.abc import Iterable

from .autops import VA, InvariantError, normalize
from .spancore import DocLike, Mapping, Marker, Span, refwords_of, text_of

# A partial run state: sorted tuple of (variable, begin, end) with end -1 while open.
_Partial = tuple


def _coreachable(A: VA, text: str) -> list[set[int]]:
    """``live[i]`` holds the states from which an accepting run can finish reading ``text[i:]``."""
    n = len(text)
    rev_letter: list[dict[str, list[int]]] = [dict() for _ in range(A.n_states)]
    rev_marker: list[list[int]] = [[] for _ in range(A.n_states)]
    for p, l, q in A.transitions:
        if isinstance(l, Marker):
            rev_marker[q].append(p)
        else:
            rev_letter[q].setdefault(l, []).append(p)
    live: list[set[int]] = [set() for _ in range(n + 1)]
    for i in range(n, -1, -1):
        if i == n:
            frontier = set(A.finals)
        else:
            frontier = {p for q in live[i + 1] for p in rev_letter[q].get(text[i], ())}
        stack = list(frontier)
        while stack:
            q = stack.pop()
            for p in rev_marker[q]:
                if p not in frontier:
                    frontier.add(p)
                    stack.append(p)
        live[i] = frontier
    return live


def _apply(partial: _Partial, marker: Marker, i: int) -> _Partial:
    var = marker.var
    if marker.is_open:
        if any(v == var for v, _, _ in partial):
            raise InvariantError(f"variable {var} opened twice: automaton is not sequential")
        return tuple(sorted(partial + ((var, i, -1),)))
    for k, (v, b, e) in enumerate(partial):
        if v == var:
            if e != -1:
                raise InvariantError(f"variable {var} closed twice: automaton is not sequential")
            return partial[:k] + ((v, b, i),) + partial[k + 1 :]
    raise InvariantError(f"variable {var} closed before opening: automaton is not sequential")


def evaluate(A: VA, d: DocLike) -> set[Mapping]:
    """All mappings the automaton produces on ``d``.

    Runs are explored position by position over the product of the automaton
    and the document, keeping one entry per (state, partial mapping) and
    pruning states that cannot reach acceptance.
    """
    text = text_of(d)
    A = normalize(A)
    if not A.finals:
        return set()
    live = _coreachable(A, text)
    if A.initial not in live[0]:
        return set()
    out = A.out
    n = len(text)
    layer: set[tuple[int, _Partial]] = {(A.initial, ())}
    results: set[Mapping] = set()
    for i in range(n + 1):
        seen = set(layer)
        stack = list(layer)
        while stack:
            q, partial = stack.pop()
            for l, r in out[q]:
                if isinstance(l, Marker) and r in live[i]:
                    # _apply rejects a second open or close, which bounds each block
                    item = (r, _apply(partial, l, i))
                    if item not in seen:
                        seen.add(item)
                        stack.append(item)
        if i == n:
            for q, partial in seen:
                if q in A.finals:
                    if any(e == -1 for _, _, e in partial):
                        raise InvariantError("variable left open at acceptance: automaton is not sequential")
                    results.add(Mapping((v, Span(b, e)) for v, b, e in partial))
            break
        a = text[i]
        nxt_live = live[i + 1]
        layer = set()
        for q, partial in seen:
            for l, r in out[q]:
                if l == a and r in nxt_live:
                    layer.add((r, partial))
    return results


def contains(A: VA, d: DocLike, m: Mapping) -> bool:
    """Membership of one mapping, via the product with the ref-word automaton of ``(d, m)``."""
    m = Mapping(m)
    text = text_of(d)
    if not m.fits(len(text)):
        return False
    A = normalize(A)
    R = refwords_of(text, m)
    a_lab = A.out_by_label
    start = (A.initial, R.initial)
    seen = {start}
    stack = [start]
    while stack:
        p, q = stack.pop()
        if p in A.finals and q in R.finals:
            return True
        for l, q2 in R.out[q]:
            for p2 in a_lab[p].get(l, ()):
                if (p2, q2) not in seen:
                    seen.add((p2, q2))
                    stack.append((p2, q2))
    return False


def bool_abstraction(A: VA, d: DocLike) -> set[frozenset[str]]:
    """Variable sets assigned by the mappings of ``A`` on ``d``.

    Each Boolean assignment is given by the set of variables set to 1.
    """
    return {m.domain for m in evaluate(A, d)}


def evaluate_runs(A: VA, d: DocLike) -> set[Mapping]:
    """Reference evaluation by enumerating every accepting run; exponential."""
    from .spancore import decode_refword

    text = text_of(d)
    A = normalize(A)
    results: set[Mapping] = set()
    limit = len(text) + 2 * len(A.variables)

    def walk(q: int, i: int, word: list) -> None:
        if len(word) > limit:
            return
        if i == len(text) and q in A.finals:
            results.add(decode_refword(word)[1])
        for l, r in A.out[q]:
            if isinstance(l, Marker):
                walk(r, i, word + [l])
            elif i < len(text) and l == text[i]:
                walk(r, i + 1, word + [l])

    walk(A.initial, 0, [])
    return results


def sorted_mappings(mappings: Iterable[Mapping]) -> list[Mapping]:
    return sorted(mappings, key=lambda m: tuple(m.items()))
