"""Spanner algebra on sequential variable-set automata."""

from __future__ import annotations

from collections.abc import Callable, Iterable
from itertools import combinations

from ..spancore import Marker, dagger, marker_key
from .ordering import delta, determinize, order_markers
from .va import VA, NotSequential, empty, explore, normalize, trim


class VariableClash(ValueError):
    """Operands of a cartesian product or concatenation share variables."""


def _require(*automata: VA) -> None:
    for A in automata:
        if not A.is_sequential:
            raise NotSequential("operand is not sequential")


# -- unary -----------------------------------------------------------------


def project(A: VA, keep: Iterable[str]) -> VA:
    """Restrict every output mapping to the variables in ``keep``."""
    keep = frozenset(keep)
    transitions = tuple(
        (p, None if isinstance(l, Marker) and l.var not in keep else l, q) for p, l, q in A.transitions
    )
    B = VA(A.alphabet, frozenset(), A.n_states, A.initial, A.finals, transitions)
    B = normalize(B)
    return VA(B.alphabet, A.variables & keep, B.n_states, B.initial, B.finals, B.transitions)


def rename(A: VA, f: Callable[[str], str]) -> VA:
    transitions = tuple(
        (p, Marker(l.kind, f(l.var)) if isinstance(l, Marker) else l, q) for p, l, q in A.transitions
    )
    return VA(A.alphabet, frozenset(map(f, A.variables)), A.n_states, A.initial, A.finals, transitions)


def rename_dagger(A: VA) -> VA:
    return rename(A, dagger)


def restrict_markers(A: VA, keep: Iterable[str]) -> VA:
    """Drop every marker transition of a variable outside ``keep``."""
    keep = frozenset(keep)
    transitions = tuple(
        t for t in A.transitions if not (isinstance(t[1], Marker) and t[1].var not in keep)
    )
    return trim(VA(A.alphabet, A.variables & keep, A.n_states, A.initial, A.finals, transitions))


# -- union and concatenation -------------------------------------------------


def union_all(automata: Iterable[VA], alphabet: Iterable[str] = (), variables: Iterable[str] = ()) -> VA:
    """Union with a fresh initial state copying the initial moves of each operand."""
    automata = [normalize(A) for A in automata]
    alphabet = frozenset(alphabet).union(*(A.alphabet for A in automata))
    variables = frozenset(variables).union(*(A.variables for A in automata))
    automata = [A for A in automata if A.finals]
    if not automata:
        return empty(alphabet, variables)
    if len(automata) == 1:
        A = automata[0]
        return VA(alphabet, variables, A.n_states, A.initial, A.finals, A.transitions)
    transitions = []
    finals = set()
    offset = 1
    for A in automata:
        for p, l, q in A.transitions:
            transitions.append((p + offset, l, q + offset))
            if p == A.initial:
                transitions.append((0, l, q + offset))
        finals.update(q + offset for q in A.finals)
        if A.initial in A.finals:
            finals.add(0)
        offset += A.n_states
    return trim(VA(alphabet, variables, offset, 0, frozenset(finals), tuple(transitions)))


def union(A: VA, B: VA) -> VA:
    _require(A, B)
    return union_all([A, B])


def concat(A: VA, B: VA) -> VA:
    _require(A, B)
    if A.variables & B.variables:
        raise VariableClash(f"shared variables {sorted(A.variables & B.variables)}")
    n = A.n_states
    transitions = list(A.transitions)
    transitions += [(p + n, l, q + n) for p, l, q in B.transitions]
    transitions += [(f, None, B.initial + n) for f in A.finals]
    C = VA(
        A.alphabet | B.alphabet,
        A.variables | B.variables,
        n + B.n_states,
        A.initial,
        frozenset(q + n for q in B.finals),
        tuple(transitions),
    )
    return normalize(C)


# -- products ----------------------------------------------------------------


def _ordered_product(
    A: VA,
    B: VA,
    shared: frozenset[str],
    variables: Iterable[str],
) -> VA:
    """Product of two ordered automata.

    Letters and markers of ``shared`` variables fire jointly; the remaining
    markers interleave, constrained to increasing canonical order inside a
    block so that each pair of runs is combined exactly once.
    """
    a_out, b_out = A.out, B.out
    b_lab = B.out_by_label
    a_fin, b_fin = A.finals, B.finals

    def successors(key):
        p, q, last = key
        res = []
        for l, p2 in a_out[p]:
            if isinstance(l, str):
                for q2 in b_lab[q].get(l, ()):
                    res.append((l, (p2, q2, None)))
                continue
            k = marker_key(l)
            if last is not None and k <= last:
                continue
            if l.var in shared:
                for q2 in b_lab[q].get(l, ()):
                    res.append((l, (p2, q2, k)))
            else:
                res.append((l, (p2, q, k)))
        for l, q2 in b_out[q]:
            if isinstance(l, Marker) and l.var not in shared:
                k = marker_key(l)
                if last is None or k > last:
                    res.append((l, (p, q2, k)))
        return res

    def is_final(key):
        return key[0] in a_fin and key[1] in b_fin

    C = explore((A.initial, B.initial, None), successors, is_final, A.alphabet | B.alphabet, variables)
    return trim(C)


def cartesian_product(A: VA, B: VA) -> VA:
    """Merged pairs of mappings; the operands must use disjoint variables."""
    if A.variables & B.variables:
        raise VariableClash(f"shared variables {sorted(A.variables & B.variables)}")
    _require(A, B)
    return _ordered_product(order_markers(A), order_markers(B), frozenset(), A.variables | B.variables)


def synchronized_product(A: VA, B: VA) -> VA:
    """Intersection of the ref-word languages of two ordered automata."""
    shared = A.variables | B.variables
    return _ordered_product(A, B, shared, shared)


# -- decomposition -------------------------------------------------------------


def decompose(A: VA, method: str = "track") -> list[tuple[frozenset[str], VA]]:
    """Split a sequential automaton into functional parts, one per assigned variable set.

    ``track`` follows the set of opened variables in the state; ``difference``
    builds each part as the automaton restricted to the markers of ``X`` minus
    the union of its restrictions to the proper maximal subsets of ``X``.
    """
    A = normalize(A)
    _require(A)
    if method == "difference":
        return _decompose_by_difference(A)
    if method != "track":
        raise ValueError(f"unknown method {method!r}")
    if not A.finals:
        return []
    names = sorted(A.used_variables)
    index = {v: i for i, v in enumerate(names)}
    out = A.out

    def successors(key):
        q, mask = key
        res = []
        for l, r in out[q]:
            if isinstance(l, Marker) and l.is_open:
                res.append((l, (r, mask | 1 << index[l.var])))
            else:
                res.append((l, (r, mask)))
        return res

    M = explore((A.initial, 0), successors, lambda k: False, A.alphabet, A.variables)
    keys = M.notes
    by_mask: dict[int, set[int]] = {}
    for i, (q, mask) in enumerate(keys):
        if q in A.finals:
            by_mask.setdefault(mask, set()).add(i)
    parts = []
    for mask, fins in by_mask.items():
        X = frozenset(v for v in names if mask >> index[v] & 1)
        part = trim(VA(M.alphabet, X, M.n_states, 0, frozenset(fins), M.transitions))
        part = VA(part.alphabet, X, part.n_states, part.initial, part.finals, part.transitions)
        if part.finals:
            parts.append((X, part))
    parts.sort(key=lambda item: sorted(item[0]))
    return parts


def _decompose_by_difference(A: VA) -> list[tuple[frozenset[str], VA]]:
    names = sorted(A.used_variables)
    parts = []
    for k in range(len(names) + 1):
        for combo in combinations(names, k):
            X = frozenset(combo)
            upper = restrict_markers(A, X)
            lower = union_all([restrict_markers(A, X - {x}) for x in X], A.alphabet, X)
            part = difference(upper, lower) if X else upper
            part = VA(part.alphabet, X, part.n_states, part.initial, part.finals, part.transitions)
            if part.finals:
                parts.append((X, part))
    parts.sort(key=lambda item: sorted(item[0]))
    return parts


# -- join, intersection, difference ------------------------------------------------


def join(A: VA, B: VA, method: str = "decompose") -> VA:
    """Natural join of schemaless spanners: merges of compatible mapping pairs."""
    _require(A, B)
    alphabet = A.alphabet | B.alphabet
    variables = A.variables | B.variables
    if method == "direct":
        return _join_direct(order_markers(A), order_markers(B), variables)
    if method != "decompose":
        raise ValueError(f"unknown method {method!r}")
    left = [(X, order_markers(P)) for X, P in decompose(A)]
    right = [(Y, order_markers(Q)) for Y, Q in decompose(B)]
    pieces = [_ordered_product(P, Q, X & Y, X | Y) for X, P in left for Y, Q in right]
    return union_all(pieces, alphabet, variables)


def _join_direct(A: VA, B: VA, variables: frozenset[str]) -> VA:
    """Join without decomposition.

    For each variable used on both sides the state records who assigns it:
    nobody yet, the left side alone, the right side alone, or both jointly.
    """
    shared = sorted(A.used_variables & B.used_variables)
    index = {v: i for i, v in enumerate(shared)}
    a_out, b_out = A.out, B.out
    b_lab = B.out_by_label
    NONE, LEFT, RIGHT, BOTH = 0, 1, 2, 3

    def set_owner(owner, v, who):
        i = index[v]
        return owner[:i] + (who,) + owner[i + 1 :]

    def successors(key):
        p, q, last, owner = key
        res = []
        for l, p2 in a_out[p]:
            if isinstance(l, str):
                for q2 in b_lab[q].get(l, ()):
                    res.append((l, (p2, q2, None, owner)))
                continue
            k = marker_key(l)
            if last is not None and k <= last:
                continue
            if l.var not in index:
                res.append((l, (p2, q, k, owner)))
                continue
            who = owner[index[l.var]]
            if l.is_open:
                if who != NONE:
                    continue
                res.append((l, (p2, q, k, set_owner(owner, l.var, LEFT))))
                for q2 in b_lab[q].get(l, ()):
                    res.append((l, (p2, q2, k, set_owner(owner, l.var, BOTH))))
            elif who == LEFT:
                res.append((l, (p2, q, k, owner)))
            elif who == BOTH:
                for q2 in b_lab[q].get(l, ()):
                    res.append((l, (p2, q2, k, owner)))
        for l, q2 in b_out[q]:
            if not isinstance(l, Marker):
                continue
            k = marker_key(l)
            if last is not None and k <= last:
                continue
            if l.var not in index:
                res.append((l, (p, q2, k, owner)))
                continue
            who = owner[index[l.var]]
            if l.is_open and who == NONE:
                res.append((l, (p, q2, k, set_owner(owner, l.var, RIGHT))))
            elif not l.is_open and who == RIGHT:
                res.append((l, (p, q2, k, owner)))
        return res

    def is_final(key):
        return key[0] in A.finals and key[1] in B.finals

    init = (A.initial, B.initial, None, (NONE,) * len(shared))
    return trim(explore(init, successors, is_final, A.alphabet | B.alphabet, variables))


def intersection(A: VA, B: VA, method: str = "decompose") -> VA:
    """Mappings produced by both operands.

    ``decompose`` joins the functional parts with equal variable sets;
    ``product`` intersects the ordered ref-word languages directly.
    """
    _require(A, B)
    alphabet = A.alphabet | B.alphabet
    variables = A.variables & B.variables
    if method == "product":
        C = synchronized_product(order_markers(A), order_markers(B))
        return VA(C.alphabet, variables, C.n_states, C.initial, C.finals, C.transitions)
    if method != "decompose":
        raise ValueError(f"unknown method {method!r}")
    right = dict(decompose(B))
    pieces = []
    for X, P in decompose(A):
        Q = right.get(X)
        if Q is not None:
            pieces.append(_ordered_product(order_markers(P), order_markers(Q), X, X))
    return union_all(pieces, alphabet, variables)


def difference(A: VA, B: VA) -> VA:
    """Mappings of ``A`` not produced by ``B``.

    Both sides are put in canonical marker order, ``B`` is determinized and
    completed, and the product accepts where ``A`` accepts and ``B`` does not.
    """
    _require(A, B)
    A1 = order_markers(A)
    B1 = order_markers(B)
    alphabet = A.alphabet | B.alphabet
    variables = A.variables | B.variables
    symbols = VA(alphabet, variables, 1, 0, frozenset(), ()).symbols
    D = determinize(B1, symbols)
    step = delta(D)
    a_out = A1.out

    def successors(key):
        p, q = key
        return [(l, (p2, step[(q, l)])) for l, p2 in a_out[p]]

    def is_final(key):
        return key[0] in A1.finals and key[1] not in D.finals

    C = trim(explore((A1.initial, D.initial), successors, is_final, alphabet, A.variables))
    return C
