"""The variable-set automaton type, its JSON form and the structural checks."""

from __future__ import annotations

import json
from collections import defaultdict, deque
from collections.abc import Callable, Hashable, Iterable
from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

from ..spancore import Marker, close, marker_key, open_

Label = Union[str, Marker, None]
EPS = None


class InvariantError(RuntimeError):
    """An internal invariant of a construction was violated."""


class NotSequential(ValueError):
    """The automaton admits an accepting run that is not valid."""


def is_letter(label: Label) -> bool:
    return isinstance(label, str)


def is_marker(label: Label) -> bool:
    return isinstance(label, Marker)


@dataclass(frozen=True)
class VA:
    """Nondeterministic automaton over letters, open/close markers and epsilon.

    States are the dense integers ``0 .. n_states-1``.  Transitions are
    ``(source, label, target)`` with label a one-character string, a
    :class:`Marker` or ``None`` for epsilon.
    """

    alphabet: frozenset[str]
    variables: frozenset[str]
    n_states: int
    initial: int
    finals: frozenset[int]
    transitions: tuple[tuple[int, Label, int], ...]
    notes: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self) -> None:
        trans = tuple(dict.fromkeys(self.transitions))
        letters = {l for _, l, _ in trans if isinstance(l, str)}
        used = {l.var for _, l, _ in trans if isinstance(l, Marker)}
        object.__setattr__(self, "transitions", trans)
        object.__setattr__(self, "finals", frozenset(self.finals))
        object.__setattr__(self, "alphabet", frozenset(self.alphabet) | letters)
        object.__setattr__(self, "variables", frozenset(self.variables) | used)
        n = self.n_states
        if n < 1 or not 0 <= self.initial < n:
            raise ValueError("initial state out of range")
        if any(not 0 <= q < n for q in self.finals):
            raise ValueError("final state out of range")
        for p, l, q in trans:
            if not (0 <= p < n and 0 <= q < n):
                raise ValueError(f"transition endpoint out of range: {(p, l, q)}")
            if isinstance(l, str) and len(l) != 1:
                raise ValueError(f"letters must be single characters: {l!r}")

    # -- indexes -----------------------------------------------------------

    @cached_property
    def out(self) -> list[list[tuple[Label, int]]]:
        adj: list[list[tuple[Label, int]]] = [[] for _ in range(self.n_states)]
        for p, l, q in self.transitions:
            adj[p].append((l, q))
        return adj

    @cached_property
    def out_by_label(self) -> list[dict[Label, list[int]]]:
        adj: list[dict[Label, list[int]]] = [defaultdict(list) for _ in range(self.n_states)]
        for p, l, q in self.transitions:
            adj[p][l].append(q)
        return [dict(a) for a in adj]

    @cached_property
    def used_variables(self) -> frozenset[str]:
        return frozenset(l.var for _, l, _ in self.transitions if isinstance(l, Marker))

    @cached_property
    def has_epsilon(self) -> bool:
        return any(l is None for _, l, _ in self.transitions)

    @property
    def symbols(self) -> list[Label]:
        ms = [open_(v) for v in self.variables] + [close(v) for v in self.variables]
        return sorted(self.alphabet) + sorted(ms, key=marker_key)

    # -- flags ---------------------------------------------------------------

    @cached_property
    def is_trimmed(self) -> bool:
        return trim(self) is self

    @cached_property
    def is_empty(self) -> bool:
        return not trim(self).finals

    @cached_property
    def is_sequential(self) -> bool:
        return check_sequential(self)[0]

    @cached_property
    def is_functional(self) -> bool:
        return check_functional(self)

    @cached_property
    def is_ordered(self) -> bool:
        return check_ordered(self)

    @cached_property
    def is_deterministic(self) -> bool:
        seen = set()
        for p, l, _ in self.transitions:
            if l is None or (p, l) in seen:
                return False
            seen.add((p, l))
        return True

    def stats(self) -> dict:
        return {
            "states": self.n_states,
            "transitions": len(self.transitions),
            "variables": len(self.variables),
            "sequential": self.is_sequential,
            "functional": self.is_functional if self.is_sequential else False,
            "ordered": self.is_ordered if self.is_sequential else False,
            "deterministic": self.is_deterministic,
        }

    # -- JSON ----------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "alphabet": sorted(self.alphabet),
            "variables": sorted(self.variables),
            "states": self.n_states,
            "initial": self.initial,
            "finals": sorted(self.finals),
            "transitions": [
                {"from": p, "label": label_to_json(l), "to": q}
                for p, l, q in sorted(self.transitions, key=_trans_key)
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), ensure_ascii=False, indent=1)

    @classmethod
    def from_json(cls, obj: dict) -> "VA":
        try:
            return cls(
                alphabet=frozenset(obj.get("alphabet", [])),
                variables=frozenset(obj.get("variables", [])),
                n_states=int(obj["states"]),
                initial=int(obj["initial"]),
                finals=frozenset(int(q) for q in obj["finals"]),
                transitions=tuple(
                    (int(t["from"]), label_from_json(t["label"]), int(t["to"]))
                    for t in obj["transitions"]
                ),
            )
        except (KeyError, TypeError, AttributeError) as exc:
            raise ValueError(f"malformed automaton JSON: {exc}") from exc

    @classmethod
    def loads(cls, text: str) -> "VA":
        return cls.from_json(json.loads(text))


def _trans_key(t):
    p, l, q = t
    if l is None:
        lk = (0, "", "")
    elif isinstance(l, str):
        lk = (1, l, "")
    else:
        lk = (2, l.kind, l.var)
    return (p, lk, q)


def label_to_json(l: Label) -> dict:
    if l is None:
        return {"type": "eps", "value": None}
    if isinstance(l, str):
        return {"type": "letter", "value": l}
    return {"type": l.kind, "value": l.var}


def label_from_json(obj: dict) -> Label:
    kind = obj["type"]
    if kind == "eps":
        return None
    if kind == "letter":
        value = obj["value"]
        if not isinstance(value, str) or len(value) != 1:
            raise ValueError(f"bad letter {value!r}")
        return value
    if kind in ("open", "close"):
        return Marker(kind, str(obj["value"]))
    raise ValueError(f"unknown label type {kind!r}")


# -- building --------------------------------------------------------------


def empty(alphabet: Iterable[str] = (), variables: Iterable[str] = ()) -> VA:
    """The canonical automaton of the empty spanner."""
    return VA(frozenset(alphabet), frozenset(variables), 1, 0, frozenset(), ())


def universal(alphabet: Iterable[str]) -> VA:
    """Accepts every document with the empty mapping."""
    alphabet = frozenset(alphabet)
    return VA(alphabet, frozenset(), 1, 0, frozenset([0]), tuple((0, a, 0) for a in sorted(alphabet)))


def explore(
    init: Hashable,
    successors: Callable[[Hashable], Iterable[tuple[Label, Hashable]]],
    is_final: Callable[[Hashable], bool],
    alphabet: Iterable[str],
    variables: Iterable[str],
    limit: int | None = None,
) -> VA:
    """Materialize the part of an implicit automaton reachable from ``init``."""
    ids = {init: 0}
    keys = [init]
    queue = deque([init])
    transitions = []
    finals = []
    while queue:
        key = queue.popleft()
        src = ids[key]
        if is_final(key):
            finals.append(src)
        for label, nxt in successors(key):
            dst = ids.get(nxt)
            if dst is None:
                dst = ids[nxt] = len(ids)
                keys.append(nxt)
                if limit is not None and dst >= limit:
                    raise StateLimitExceeded(limit)
                queue.append(nxt)
            transitions.append((src, label, dst))
    return VA(
        frozenset(alphabet), frozenset(variables), len(ids), 0, frozenset(finals), tuple(transitions), tuple(keys)
    )


class StateLimitExceeded(RuntimeError):
    def __init__(self, limit: int):
        super().__init__(f"construction exceeded {limit} states")
        self.limit = limit


# -- normalization -----------------------------------------------------------


def trim(A: VA) -> VA:
    """Keep only the states lying on some accepting run."""
    fwd = {A.initial}
    stack = [A.initial]
    out = A.out
    while stack:
        p = stack.pop()
        for _, q in out[p]:
            if q not in fwd:
                fwd.add(q)
                stack.append(q)
    rev: list[list[int]] = [[] for _ in range(A.n_states)]
    for p, _, q in A.transitions:
        rev[q].append(p)
    bwd = {q for q in A.finals if q in fwd}
    stack = list(bwd)
    while stack:
        q = stack.pop()
        for p in rev[q]:
            if p in fwd and p not in bwd:
                bwd.add(p)
                stack.append(p)
    if A.initial not in bwd:
        E = empty(A.alphabet, A.variables)
        return A if A == E else E
    if len(bwd) == A.n_states:
        return A
    keep = sorted(bwd)
    new = {q: i for i, q in enumerate(keep)}
    return VA(
        A.alphabet,
        A.variables,
        len(keep),
        new[A.initial],
        frozenset(new[q] for q in A.finals if q in new),
        tuple((new[p], l, new[q]) for p, l, q in A.transitions if p in new and q in new),
    )


def epsilon_closures(A: VA) -> list[set[int]]:
    eps_out: list[list[int]] = [[] for _ in range(A.n_states)]
    for p, l, q in A.transitions:
        if l is None:
            eps_out[p].append(q)
    closures = []
    for q in range(A.n_states):
        seen = {q}
        stack = [q]
        while stack:
            p = stack.pop()
            for r in eps_out[p]:
                if r not in seen:
                    seen.add(r)
                    stack.append(r)
        closures.append(seen)
    return closures


def eliminate_epsilon(A: VA) -> VA:
    """Remove epsilon transitions without changing the state set.

    A state becomes final if it epsilon-reaches a final state, and every
    non-epsilon transition is copied back to all states that epsilon-reach
    its source.
    """
    if not A.has_epsilon:
        return A
    closures = epsilon_closures(A)
    out = A.out
    finals = {q for q in range(A.n_states) if closures[q] & A.finals}
    transitions = []
    for q in range(A.n_states):
        for p in closures[q]:
            for l, r in out[p]:
                if l is not None:
                    transitions.append((q, l, r))
    return VA(A.alphabet, A.variables, A.n_states, A.initial, frozenset(finals), tuple(transitions))


def normalize(A: VA) -> VA:
    return trim(eliminate_epsilon(A))


def _quotient(A: VA, block: list[int], n_blocks: int) -> VA:
    return VA(
        A.alphabet,
        A.variables,
        n_blocks,
        block[A.initial],
        frozenset(block[q] for q in A.finals),
        tuple((block[p], l, block[q]) for p, l, q in A.transitions),
    )


def _coarsest(A: VA, backward: bool) -> tuple[list[int], int]:
    """Coarsest partition in which equivalent states have the same moves into each block."""
    if backward:
        moves: list[list[tuple]] = [[] for _ in range(A.n_states)]
        for p, l, q in A.transitions:
            moves[q].append((l, p))
        block = [int(q == A.initial) for q in range(A.n_states)]
    else:
        moves = A.out
        block = [int(q in A.finals) for q in range(A.n_states)]
    count = len(set(block))
    while True:
        ids: dict = {}
        new = [ids.setdefault((block[q], frozenset((l, block[r]) for l, r in moves[q])), len(ids)) for q in range(A.n_states)]
        if len(ids) == count:
            return new, count
        block, count = new, len(ids)


def reduce_states(A: VA) -> VA:
    """Merge bisimilar states (forward, then backward, until stable).

    The quotient accepts the same ref-words; it is not a minimal automaton.
    """
    A = normalize(A)
    while True:
        before = A.n_states
        for backward in (False, True):
            block, count = _coarsest(A, backward)
            if count < A.n_states:
                A = _quotient(A, block, count)
        if A.n_states == before:
            return A


# -- checks --------------------------------------------------------------------


def check_sequential(A: VA) -> tuple[bool, dict[int, frozenset[str]] | None]:
    """Decide sequentiality by a search over per-variable status vectors.

    Returns ``(True, open_sets)`` where ``open_sets`` maps each state of
    ``trim(A)`` to the variables open when it is visited, or ``(False, None)``.
    """
    T = trim(A)
    if not T.finals:
        return True, {T.initial: frozenset()}
    index = {v: i for i, v in enumerate(sorted(T.used_variables))}
    init = (T.initial, 0, 0)
    seen = {init}
    stack = [init]
    opens: dict[int, set[int]] = defaultdict(set)
    out = T.out
    while stack:
        q, opened, closed = stack.pop()
        opens[q].add(opened & ~closed)
        if q in T.finals and opened != closed:
            return False, None
        for l, r in out[q]:
            if isinstance(l, Marker):
                bit = 1 << index[l.var]
                if l.is_open:
                    if opened & bit:
                        return False, None
                    nxt = (r, opened | bit, closed)
                else:
                    if not opened & bit or closed & bit:
                        return False, None
                    nxt = (r, opened, closed | bit)
            else:
                nxt = (r, opened, closed)
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    names = sorted(index)
    annotation = {}
    for q, masks in opens.items():
        if len(masks) != 1:
            raise InvariantError(f"state {q} has several open-variable sets")
        (mask,) = masks
        annotation[q] = frozenset(v for i, v in enumerate(names) if mask >> i & 1)
    return True, annotation


def check_functional(A: VA) -> bool:
    """True iff every accepting run of a sequential automaton assigns all its variables."""
    T = trim(A)
    if not T.finals:
        return True
    index = {v: i for i, v in enumerate(sorted(T.used_variables))}
    full = (1 << len(index)) - 1
    init = (T.initial, 0)
    seen = {init}
    stack = [init]
    while stack:
        q, done = stack.pop()
        if q in T.finals and done != full:
            return False
        for l, r in T.out[q]:
            nxt = (r, done | (1 << index[l.var]) if isinstance(l, Marker) and not l.is_open else done)
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return True


def check_ordered(A: VA) -> bool:
    """True iff every maximal marker block of an accepted ref-word is canonically sorted."""
    T = normalize(A)
    out = T.out
    for p, l, q in T.transitions:
        if isinstance(l, Marker):
            k = marker_key(l)
            for l2, _ in out[q]:
                if isinstance(l2, Marker) and marker_key(l2) <= k:
                    return False
    return True


def require_sequential(A: VA) -> None:
    if not A.is_sequential:
        raise NotSequential("automaton is not sequential")
