"""Brute-force reference implementations, independent of the automaton code."""

from __future__ import annotations

import random
from functools import lru_cache
from itertools import combinations, product

from spanline.regex import Alt, Capture, Concat, Empty, Epsilon, Formula, Letter, Star
from spanline.spancore import Mapping, Span

# -- formula semantics ---------------------------------------------------------------


def formula_mappings(e: Formula, text: str) -> set[Mapping]:
    """Mappings of a formula on ``text`` computed from the formula's structure."""

    @lru_cache(maxsize=None)
    def match(f: Formula, i: int) -> frozenset:
        if isinstance(f, Empty):
            return frozenset()
        if isinstance(f, Epsilon):
            return frozenset({(i, Mapping())})
        if isinstance(f, Letter):
            return frozenset({(i + 1, Mapping())}) if i < len(text) and text[i] == f.char else frozenset()
        if isinstance(f, Alt):
            return match(f.left, i) | match(f.right, i)
        if isinstance(f, Concat):
            out = set()
            for j, m1 in match(f.left, i):
                for k, m2 in match(f.right, j):
                    if not m1.domain & m2.domain:
                        out.add((k, Mapping({**m1, **m2})))
            return frozenset(out)
        if isinstance(f, Capture):
            return frozenset(
                (j, Mapping({**m, f.var: Span(i, j)})) for j, m in match(f.inner, i) if f.var not in m
            )
        if isinstance(f, Star):
            reached = {(i, Mapping())}
            frontier = list(reached)
            while frontier:
                j, m = frontier.pop()
                for k, m2 in match(f.inner, j):
                    if not m.domain & m2.domain:
                        item = (k, Mapping({**m, **m2}))
                        if item not in reached:
                            reached.add(item)
                            frontier.append(item)
            return frozenset(reached)
        raise TypeError(f)

    return {m for j, m in match(e, 0) if j == len(text)}


def random_formula(rng: random.Random, depth: int = 3, letters: str = "ab", variables: str = "xyz") -> Formula:
    if depth == 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.08:
            return Epsilon()
        if r < 0.1:
            return Empty()
        return Letter(rng.choice(letters))
    kind = rng.choice(["cat", "cat", "alt", "star", "cap"])
    if kind == "cat":
        return Concat(random_formula(rng, depth - 1, letters, variables), random_formula(rng, depth - 1, letters, variables))
    if kind == "alt":
        return Alt(random_formula(rng, depth - 1, letters, variables), random_formula(rng, depth - 1, letters, variables))
    if kind == "star":
        return Star(random_formula(rng, depth - 1, letters, variables))
    return Capture(rng.choice(variables), random_formula(rng, depth - 1, letters, variables))


# -- set-level spanner algebra -----------------------------------------------------------


def compatible(m1: Mapping, m2: Mapping) -> bool:
    return all(m1[v] == m2[v] for v in m1.domain & m2.domain)


def brute_join(left, right) -> set[Mapping]:
    return {Mapping({**a, **b}) for a in left for b in right if compatible(a, b)}


def brute_project(ms, keep) -> set[Mapping]:
    keep = set(keep)
    return {Mapping({v: s for v, s in m.items() if v in keep}) for m in ms}


# -- domination -------------------------------------------------------------------------


def brute_skyline(ms, leq) -> set[Mapping]:
    """Maximal elements: those not strictly below another element."""
    ms = set(ms)
    return {m for m in ms if not any(o != m and leq(m, o) for o in ms)}


def pair_leq(pairs: set[tuple[Span | None, Span | None]]):
    """Variable-wise order from a set of allowed (lhs, rhs) span pairs, including equality."""

    def leq(m1: Mapping, m2: Mapping) -> bool:
        for v in m1.domain | m2.domain:
            a, b = m1.get(v), m2.get(v)
            if a != b and (a, b) not in pairs:
                return False
        return True

    return leq


def varinc_leq(m1: Mapping, m2: Mapping) -> bool:
    return all(v in m2 and m2[v] == s for v, s in m1.items())


def spaninc_leq(m1: Mapping, m2: Mapping) -> bool:
    if m1.domain != m2.domain:
        return False
    return all(m2[v].begin <= s.begin and s.end <= m2[v].end for v, s in m1.items())


def ltr_leq(m1: Mapping, m2: Mapping) -> bool:
    if m1.domain != m2.domain:
        return False
    return all(m2[v].begin == s.begin and s.end <= m2[v].end for v, s in m1.items())


def self_leq(m1: Mapping, m2: Mapping) -> bool:
    return m1 == m2


def spanlen_leq(m1: Mapping, m2: Mapping) -> bool:
    if m1.domain != m2.domain:
        return False
    if all(len(m1[v]) == len(m2[v]) for v in m1):
        return m1 == m2
    return all(len(m1[v]) <= len(m2[v]) for v in m1)


LEQ = {"self": self_leq, "varinc": varinc_leq, "spaninc": spaninc_leq, "ltr": ltr_leq, "spanlen": spanlen_leq}

# -- span families ---------------------------------------------------------------------------


def brute_max_disjoint(spans) -> int:
    """Largest pairwise non-overlapping subfamily, by include/exclude branching."""
    spans = list(spans)

    def clash(a, b):
        return max(a.begin, b.begin) < min(a.end, b.end)

    def best(i, chosen):
        if i == len(spans):
            return len(chosen)
        skip = best(i + 1, chosen)
        if all(not clash(spans[i], c) for c in chosen):
            return max(skip, best(i + 1, chosen + [spans[i]]))
        return skip

    return best(0, [])


def brute_hitting_number(spans, n: int) -> int | None:
    spans = list(spans)
    if any(s.begin == s.end for s in spans):
        return None
    for k in range(0, n + 1):
        for points in combinations(range(n), k):
            if all(any(s.begin <= p < s.end for p in points) for s in spans):
                return k
    raise AssertionError("unreachable: all positions always hit")


# -- CNF -----------------------------------------------------------------------------------


def cnf_models(n_vars: int, clauses) -> set[frozenset[int]]:
    out = set()
    for bits in product((False, True), repeat=n_vars):
        true = {i for i, b in enumerate(bits, 1) if b}
        if all(any((l > 0) == (abs(l) in true) for l in c) for c in clauses):
            out.add(frozenset(true))
    return out
