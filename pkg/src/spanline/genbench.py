"""Reduction generators, blowup families and brute-force oracles."""

from __future__ import annotations

import os
import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from itertools import combinations, product

from .autops import VA, check_sequential, concat, empty, trim, union_all
from .domination import Rule, VariableWiseRule, builtin_rule
from .regex import compile as compile_formula
from .skyline import StrictPair, max_disjoint_spans, skyline_direct, strict_pairs
from .spancore import Document, Mapping, Span, close, marker_key, open_, text_of

VARIABLE_POOL = ("x", "y", "z", "u", "w")


def default_seed() -> int:
    return int(os.environ.get("SPANLINE_SEED", "0"))


# -- CNF formulas ----------------------------------------------------------------


@dataclass(frozen=True)
class Cnf:
    """Clauses are tuples of nonzero integers; ``-i`` is the negation of variable ``i``."""

    n_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        for c in self.clauses:
            for lit in c:
                if lit == 0 or abs(lit) > self.n_vars:
                    raise ValueError(f"literal {lit} out of range")

    @property
    def n_clauses(self) -> int:
        return len(self.clauses)

    def positive(self, i: int) -> list[int]:
        """1-based indices of the clauses containing ``x_i``."""
        return [j for j, c in enumerate(self.clauses, 1) if i in c]

    def negative(self, i: int) -> list[int]:
        return [j for j, c in enumerate(self.clauses, 1) if -i in c]

    def satisfied_by(self, true_vars: Iterable[int]) -> bool:
        true_vars = set(true_vars)
        return all(any((lit > 0) == (abs(lit) in true_vars) for lit in c) for c in self.clauses)

    def models(self) -> set[frozenset[int]]:
        out = set()
        for bits in product((False, True), repeat=self.n_vars):
            s = frozenset(i for i, b in enumerate(bits, 1) if b)
            if self.satisfied_by(s):
                out.add(s)
        return out

    def is_monotone_2cnf(self) -> bool:
        return all(len(c) == 2 and all(l > 0 for l in c) for c in self.clauses)

    def occurrences(self, i: int) -> int:
        return sum(1 for c in self.clauses for lit in c if abs(lit) == i)

    @classmethod
    def from_dimacs(cls, text: str) -> "Cnf":
        n_vars = None
        clauses: list[tuple[int, ...]] = []
        current: list[int] = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("c") or line.startswith("%"):
                continue
            if line.startswith("p"):
                parts = line.split()
                if len(parts) < 4 or parts[1] != "cnf":
                    raise ValueError(f"bad problem line: {line!r}")
                n_vars = int(parts[2])
                continue
            for tok in line.split():
                lit = int(tok)
                if lit == 0:
                    clauses.append(tuple(current))
                    current = []
                else:
                    current.append(lit)
        if current:
            clauses.append(tuple(current))
        if n_vars is None:
            n_vars = max((abs(l) for c in clauses for l in c), default=0)
        return cls(n_vars, tuple(clauses))

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.n_vars} {len(self.clauses)}"]
        lines += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


def sat(F: Cnf) -> bool:
    """Satisfiability by trying every assignment."""
    if F.n_vars > 20:
        raise ValueError("brute-force satisfiability is limited to 20 variables")
    return any(
        F.satisfied_by(i for i, b in enumerate(bits, 1) if b) for bits in product((False, True), repeat=F.n_vars)
    )


def random_cnf(rng: random.Random, n_vars: int, n_clauses: int, width: int = 3) -> Cnf:
    clauses = []
    for _ in range(n_clauses):
        k = rng.randint(1, min(width, n_vars))
        chosen = rng.sample(range(1, n_vars + 1), k)
        clauses.append(tuple(sorted((v if rng.random() < 0.5 else -v for v in chosen), key=abs)))
    return Cnf(n_vars, tuple(clauses))


def all_clauses(n_vars: int) -> list[tuple[int, ...]]:
    """Every nonempty clause over ``n_vars`` variables, as a set of literals."""
    literals = [l for i in range(1, n_vars + 1) for l in (i, -i)]
    out = [c for k in range(1, len(literals) + 1) for c in combinations(literals, k)]
    return sorted(out, key=lambda c: (len(c), c))


# -- the satisfiability reduction ---------------------------------------------------


def _caps(names: Iterable[str]) -> str:
    parts = [f"{v}{{eps}}" for v in names]
    return " ".join(parts) if parts else "eps"


def sat_to_skyline_formula(F: Cnf) -> str:
    n, m = F.n_vars, F.n_clauses
    valid = []
    for i in range(1, n + 1):
        pos = _caps(f"v{i}_{j}" for j in F.positive(i))
        neg = _caps(f"v{i}_{j}" for j in F.negative(i))
        valid.append(f"({pos} | {neg})")
    r_valid = " ".join(valid) if valid else "eps"
    branches = [_caps(f"v{i}_{j}" for i in range(1, n + 1) for j in range(1, m + 1) if j != k) for k in range(1, m + 1)]
    r_mask = "a{eps} (" + (" | ".join(branches) if branches else "empty") + ")"
    return f"({r_valid}) | ({r_mask})"


def sat_to_skyline(F: Cnf) -> tuple[VA, Document, int]:
    """Automaton, document and threshold such that the skyline under variable
    inclusion has more than ``threshold`` mappings iff ``F`` is satisfiable."""
    A = compile_formula(sat_to_skyline_formula(F))
    return A, Document("", frozenset()), F.n_clauses


def satisfiable_via_skyline(F: Cnf, rule: Rule | None = None) -> bool:
    A, d, threshold = sat_to_skyline(F)
    rule = rule or builtin_rule("varinc")
    return len(skyline_direct(A, d, rule)) >= threshold + 1


# -- blowup families ----------------------------------------------------------------------


def _check_read3_monotone(F: Cnf) -> None:
    if not F.is_monotone_2cnf():
        raise ValueError("expected a monotone 2-CNF")
    for i in range(1, F.n_vars + 1):
        if F.occurrences(i) > 3:
            raise ValueError(f"variable {i} occurs more than three times")


def occurrence_index(F: Cnf) -> list[tuple[int, ...]]:
    """For each clause, the running occurrence number of each of its literals."""
    seen: dict[int, int] = {}
    out = []
    for c in F.clauses:
        idx = []
        for lit in c:
            seen[lit] = seen.get(lit, 0) + 1
            idx.append(seen[lit])
        out.append(tuple(idx))
    return out


def join_blowup_family(F: Cnf) -> tuple[str, str]:
    """Two formulas whose join on ``"a"`` keeps, per clause, an occurrence left unassigned."""
    _check_read3_monotone(F)
    r_eq = " ".join(f"(x{i}_1{{eps}} x{i}_2{{eps}} x{i}_3{{eps}} | eps)" for i in range(1, F.n_vars + 1))
    r_eq = (r_eq + " a").strip()
    occ = occurrence_index(F)
    r_c = ["a"]
    for c, idx in zip(F.clauses, occ):
        (b1, b2), (p1, p2) = c, idx
        r_c.append(f"(x{b1}_{p1}{{eps}} | x{b2}_{p2}{{eps}})")
    return r_eq, " ".join(r_c)


def join_family_expected(F: Cnf) -> set[Mapping]:
    """The join of the two family members on ``"a"``, built by hand."""
    occ = occurrence_index(F)
    out = set()
    for bits in product((False, True), repeat=F.n_vars):
        S = {i for i, b in enumerate(bits, 1) if b}
        left = {f"x{i}_{p}": Span(0, 0) for i in S for p in (1, 2, 3)}
        options = []
        for c, idx in zip(F.clauses, occ):
            options.append([f"x{b}_{p}" for b, p in zip(c, idx) if b not in S])
        for choice in product(*options):
            out.add(Mapping({**left, **{v: Span(1, 1) for v in choice}}))
    return out


def skyline_blowup_formula(F: Cnf) -> str:
    _check_read3_monotone(F)
    n, m = F.n_vars, F.n_clauses
    valid = []
    for i in range(1, n + 1):
        vs = " ".join(f"v{i}_{j}{{eps}}" for j in F.positive(i))
        valid.append(f"((x{i}{{eps}} {vs}) | xbar{i}{{eps}})")
    masks = []
    for k in range(1, m + 1):
        parts = []
        for i in range(1, n + 1):
            vs = " ".join(f"v{i}_{j}{{eps}}" for j in F.positive(i) if j != k)
            parts.append(f"x{i}{{xbar{i}{{eps}}}} {vs}".strip())
        masks.append(" ".join(parts) if parts else "eps")
    r_valid = " ".join(valid) if valid else "eps"
    r_mask = " | ".join(f"({b})" for b in masks) if masks else "empty"
    return f"({r_valid}) | {r_mask}"


def skyline_blowup_family(F: Cnf) -> VA:
    """Automaton whose variable-inclusion skyline on the empty document
    encodes the models of ``F`` on the variables ``x1..xn``."""
    return compile_formula(skyline_blowup_formula(F))


def skyline_family_projection(F: Cnf) -> set[frozenset[int]]:
    A = skyline_blowup_family(F)
    xs = {f"x{i}": i for i in range(1, F.n_vars + 1)}
    sky = skyline_direct(A, "", builtin_rule("varinc"))
    return {frozenset(xs[v] for v in m.domain if v in xs) for m in sky}


def graph_to_cnf(edges: Iterable[tuple], nodes: Sequence | None = None) -> Cnf:
    """One clause ``x_u or x_v`` per edge; vertices are numbered in sorted order."""
    edges = [tuple(e) for e in edges]
    if nodes is None:
        nodes = sorted({u for e in edges for u in e})
    index = {u: i for i, u in enumerate(nodes, 1)}
    degree: dict = {}
    for u, v in edges:
        degree[u] = degree.get(u, 0) + 1
        degree[v] = degree.get(v, 0) + 1
    if any(k > 3 for k in degree.values()):
        raise ValueError("graph has a vertex of degree above three")
    return Cnf(len(nodes), tuple((index[u], index[v]) for u, v in edges))


def random_cubic_graph(n: int, seed: int) -> list[tuple[int, int]]:
    import networkx as nx

    return sorted(tuple(sorted(e)) for e in nx.random_regular_graph(3, n, seed=seed).edges())


# -- the general reduction through disjoint strict pairs -----------------------------------


def choose_disjoint_pairs(rule: Rule, d: str, k: int) -> list[StrictPair]:
    """``k`` strict pairs of a single-variable rule with disjoint nonempty coverings."""
    by_cover: dict[Span, StrictPair] = {}
    for p in strict_pairs(rule, d):
        c = p.covering
        if c.begin < c.end and c not in by_cover:
            by_cover[c] = p
    chosen = [by_cover[c] for c in max_disjoint_spans(by_cover)]
    if len(chosen) < k:
        raise ValueError(f"only {len(chosen)} disjoint strict pairs on {d!r}")
    return sorted(chosen[:k], key=lambda p: (p.covering.begin, p.covering.end))


def _linear(text: str, start: int, assign: dict[str, Span | None], alphabet) -> VA:
    """Automaton reading ``text`` (located at ``start``) with the given captures."""
    due: dict[int, list] = {}
    for var, s in assign.items():
        if s is not None:
            due.setdefault(s.begin, []).append(open_(var))
            due.setdefault(s.end, []).append(close(var))
    symbols: list = []
    for p in range(start, start + len(text) + 1):
        symbols.extend(sorted(due.get(p, ()), key=marker_key))
        if p < start + len(text):
            symbols.append(text[p - start])
    transitions = tuple((k, sym, k + 1) for k, sym in enumerate(symbols))
    return VA(frozenset(alphabet), frozenset(assign), len(symbols) + 1, 0, frozenset([len(symbols)]), transitions)


def umdsdp_reduction(rule: Rule, d: str, pairs: Sequence[StrictPair], F: Cnf) -> VA:
    """Automaton whose skyline on ``d`` under the variable-wise rule contains a
    satisfying pattern iff ``F`` is satisfiable.

    The document is cut into one part per pair; variable ``v{i}_{j}`` is
    captured in part ``i`` following either side of the ``i``-th pair.
    """
    text = text_of(d)
    if len(pairs) != F.n_vars:
        raise ValueError("need one strict pair per variable")
    pairs = sorted(pairs, key=lambda p: (p.covering.begin, p.covering.end))
    cuts = [0]
    for a, b in zip(pairs, pairs[1:]):
        if a.covering.end > b.covering.begin:
            raise ValueError("pairs cannot be separated by cutting the document")
        cuts.append(a.covering.end)
    cuts.append(len(text))
    alphabet = frozenset(text)
    m = F.n_clauses
    clauses = range(1, m + 1)

    def gadget(i: int, second: set[int]) -> VA:
        lo, hi = cuts[i - 1], cuts[i]
        s1, s2 = pairs[i - 1].lhs, pairs[i - 1].rhs
        assign = {f"v{i}_{j}": (s2 if j in second else s1) for j in clauses}
        return _linear(text[lo:hi], lo, assign, alphabet)

    valid = None
    for i in range(1, F.n_vars + 1):
        piece = union_all(
            [gadget(i, set(F.positive(i))), gadget(i, set(F.negative(i)))],
            alphabet,
            {f"v{i}_{j}" for j in clauses},
        )
        valid = piece if valid is None else concat(valid, piece)
    masks = []
    for j in clauses:
        mask = None
        for i in range(1, F.n_vars + 1):
            piece = gadget(i, set(clauses) - {j})
            mask = piece if mask is None else concat(mask, piece)
        masks.append(mask)
    pieces = [p for p in [valid, *masks] if p is not None]
    if not pieces:
        return empty(alphabet)
    return union_all(pieces, alphabet)


def umdsdp_decodes_sat(sky: Iterable[Mapping], pairs: Sequence[StrictPair], F: Cnf) -> bool:
    """Whether some skyline mapping puts, for every clause, some variable on the dominating side."""
    pairs = sorted(pairs, key=lambda p: (p.covering.begin, p.covering.end))
    for mp in sky:
        if all(
            any(mp.get(f"v{i}_{j}") == pairs[i - 1].rhs for i in range(1, F.n_vars + 1))
            for j in range(1, F.n_clauses + 1)
        ):
            return True
    return False


def satisfiable_via_umdsdp(rule: VariableWiseRule, d: str, F: Cnf) -> bool:
    pairs = choose_disjoint_pairs(rule, d, F.n_vars)
    A = umdsdp_reduction(rule, d, pairs, F)
    return umdsdp_decodes_sat(skyline_direct(A, d, rule), pairs, F)


# -- random instances ---------------------------------------------------------------------


def random_va(
    seed: int | None = None,
    max_states: int = 8,
    max_vars: int = 3,
    alphabet: str = "ab",
    letter_density: float = 0.5,
    marker_density: float = 0.5,
    final_density: float = 0.5,
    max_tries: int = 10_000,
) -> VA:
    """A trimmed, nonempty sequential automaton drawn by rejection sampling.

    Each state carries a status per variable (unseen, open or closed).  A
    spine of states opens and closes some of the variables in a random order
    and ends in a final state; the other states copy or advance the status of
    an earlier state.  Letters connect states of equal status and markers
    advance the status of a single variable.  States with the same open
    variables are then merged at random until at most ``max_states`` remain.
    Candidates are kept if :func:`check_sequential` accepts them.
    """
    rng = random.Random(default_seed() if seed is None else seed)
    for _ in range(max_tries):
        n = rng.randint(1, 2 * max_states)
        k = rng.randint(min(1, max_vars, n // 2), min(max_vars, n // 2))
        names = VARIABLE_POOL[:k]
        status = [(0,) * k]
        on_spine = rng.sample(range(k), min(k, (n - 1) // 2, rng.randint(1, max(1, (max_states - 1) // 2))))
        pending = [(v, 1) for v in on_spine]
        while pending:
            v, level = pending.pop(rng.randrange(len(pending)))
            nxt = list(status[-1])
            nxt[v] = level
            status.append(tuple(nxt))
            if level == 1:
                pending.append((v, 2))
        spine = len(status)
        for _q in range(spine, n):
            base = list(rng.choice(status))
            movable = [v for v in range(k) if base[v] < 2]
            if movable and rng.random() < 0.6:
                base[rng.choice(movable)] += 1
            status.append(tuple(base))
        transitions = []
        for p in range(n):
            for q in range(n):
                if status[p] == status[q]:
                    for a in alphabet:
                        if rng.random() < letter_density:
                            transitions.append((p, a, q))
                diff = [v for v in range(k) if status[p][v] != status[q][v]]
                if len(diff) == 1 and status[q][diff[0]] == status[p][diff[0]] + 1:
                    if (q == p + 1 and q < spine) or rng.random() < marker_density:
                        v = diff[0]
                        transitions.append((p, open_(names[v]) if status[q][v] == 1 else close(names[v]), q))
        finals = {spine - 1} | {q for q in range(n) if 1 not in status[q] and rng.random() < final_density}
        def quotient(rep: list[int]) -> VA:
            index = {r: i for i, r in enumerate(sorted(set(rep)))}
            f = [index[rep[q]] for q in range(n)]
            return VA(
                frozenset(alphabet),
                frozenset(),
                len(index),
                f[0],
                frozenset(f[q] for q in finals),
                tuple((f[p], l, f[q]) for p, l, q in transitions),
            )

        rep = list(range(n))
        opens = [frozenset(v for v in range(k) if status[q][v] == 1) for q in range(n)]
        candidates = [(p, q) for p in range(n) for q in range(p + 1, n) if opens[p] == opens[q]]
        rng.shuffle(candidates)
        while len(set(rep)) > max_states and candidates:
            p, q = candidates.pop()
            rp, rq = rep[p], rep[q]
            if rp == rq:
                continue
            merged = [rp if r == rq else r for r in rep]
            if check_sequential(quotient(merged))[0]:
                rep = merged
        if len(set(rep)) > max_states:
            continue
        A = trim(quotient(rep))
        if A.finals and check_sequential(A)[0]:
            return A
    raise RuntimeError("no sequential automaton found")


def random_doc(seed: int | None = None, length: int = 4, alphabet: str = "ab") -> Document:
    rng = random.Random(default_seed() if seed is None else seed)
    return Document("".join(rng.choice(alphabet) for _ in range(length)), frozenset(alphabet))


def all_docs(max_len: int, alphabet: str = "ab") -> list[str]:
    return ["".join(w) for n in range(max_len + 1) for w in product(alphabet, repeat=n)]
