"""Canonical marker ordering and subset determinization over ref-words."""

from __future__ import annotations

from collections.abc import Iterable

from ..spancore import Marker, marker_key
from .va import VA, Label, NotSequential, explore, normalize


def marker_blocks(A: VA, q: int) -> set[tuple[frozenset[Marker], int]]:
    """All ``(marker set, target)`` pairs of nonempty marker-only paths leaving ``q``."""
    out = A.out
    found: set[tuple[frozenset[Marker], int]] = set()
    stack = [(q, frozenset())]
    seen = set(stack)
    while stack:
        p, ms = stack.pop()
        for l, r in out[p]:
            if isinstance(l, Marker):
                if l in ms:
                    raise NotSequential(f"marker {l} repeats inside a block")
                item = (r, ms | {l})
                if item not in seen:
                    seen.add(item)
                    stack.append(item)
                    found.add((item[1], r))
    return found


def order_markers(A: VA) -> VA:
    """Equivalent automaton whose marker blocks are all canonically sorted.

    Every state gets a primed twin that may only continue with a letter.  A
    marker-only path from ``p`` to ``q`` is replaced by a fresh path reading
    the same markers in sorted order and ending in the twin of ``q``.
    """
    A = normalize(A)
    if not A.is_sequential:
        raise NotSequential("order_markers needs a sequential automaton")
    if A.is_ordered:
        return A
    letters_out = [[(l, r) for l, r in A.out[q] if isinstance(l, str)] for q in range(A.n_states)]
    tries: dict[int, dict[tuple, dict]] = {}

    def trie(q: int) -> dict[tuple, dict]:
        if q not in tries:
            t: dict[tuple, dict] = {}
            for ms, target in marker_blocks(A, q):
                seq = tuple(sorted(ms, key=marker_key))
                for d in range(len(seq)):
                    nxt = ("p", target) if d == len(seq) - 1 else ("t", q, seq[: d + 1])
                    t.setdefault(seq[:d], {})[(seq[d], nxt)] = None
            tries[q] = t
        return tries[q]

    def successors(key):
        if key[0] == "t":
            return list(trie(key[1]).get(key[2], ()))
        q = key[1]
        result = [(l, ("q", r)) for l, r in letters_out[q]]
        if key[0] == "q":
            result.extend(trie(q).get((), ()))
        return result

    def is_final(key):
        return key[0] != "t" and key[1] in A.finals

    B = explore(("q", A.initial), successors, is_final, A.alphabet, A.variables)
    return normalize(B)


def determinize(A: VA, symbols: Iterable[Label] | None = None) -> VA:
    """Subset construction over letters and markers, completed with a sink.

    State 0 is the initial subset; the empty subset, when reachable, is the sink.
    """
    A = normalize(A) if A.has_epsilon else A
    syms = list(symbols) if symbols is not None else A.symbols
    by_label = A.out_by_label
    finals = A.finals

    def successors(subset):
        moves: dict[Label, set[int]] = {}
        for p in subset:
            for l, targets in by_label[p].items():
                moves.setdefault(l, set()).update(targets)
        return [(l, frozenset(moves.get(l, ()))) for l in syms]

    return explore(frozenset([A.initial]), successors, lambda s: bool(s & finals), A.alphabet, A.variables)


def delta(D: VA) -> dict[tuple[int, Label], int]:
    """Transition function of a deterministic automaton."""
    return {(p, l): q for p, l, q in D.transitions}
