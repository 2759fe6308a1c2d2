"""The skyline operator and the analysis of strict domination pairs."""

from __future__ import annotations

from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .autops import (
    VA,
    NotSequential,
    cartesian_product,
    determinize,
    difference,
    explore,
    intersection,
    normalize,
    order_markers,
    project,
    rename,
    rename_dagger,
    trim,
)
from .autops.ordering import delta
from .domination import (
    TEMPLATE_VAR,
    NativeRule,
    NonRegularRule,
    RegularRule,
    Rule,
    VariableWiseRule,
    builtin_rule,
    comparator,
)
from .evaluation import evaluate
from .spancore import DocLike, Mapping, Span, close, covering, dagger, is_dagger, open_, spans_of, text_of


def skyline_filter(mappings: Iterable[Mapping], d: DocLike, rule: Rule, threads: int = 1) -> set[Mapping]:
    """Keep the mappings not strictly dominated by another mapping of the set."""
    ms = sorted({Mapping(m) for m in mappings})
    cmp = comparator(rule, d)

    def maximal(m: Mapping) -> bool:
        return not any(o != m and cmp(m, o) for o in ms)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            flags = list(pool.map(maximal, ms))
    else:
        flags = [maximal(m) for m in ms]
    return {m for m, keep in zip(ms, flags) if keep}


def skyline_direct(A: VA, d: DocLike, rule: Rule, threads: int = 1) -> set[Mapping]:
    """Evaluate, then filter out the non-maximal mappings."""
    if isinstance(rule, VariableWiseRule):
        rule = rule.with_alphabet(set(text_of(d)))
    return skyline_filter(evaluate(A, d), d, rule, threads)


def skyline_compiled(A: VA, rule: Rule, method: str = "lazy") -> VA:
    """An automaton for the skyline of ``A`` under a regular rule.

    The strictly dominated mappings are the first components of pairs
    ``(m, m')`` with both mappings produced by ``A`` and the pair accepted by
    the rule but not by the identity rule; removing them from ``A`` leaves
    the skyline.

    With ``method="lazy"`` a variable-wise rule is never built for all
    variables at once: the pair automaton is run against one determinized
    template copy per variable.  ``"materialize"`` instantiates the rule and
    uses automaton intersection and difference; explicit rules always do.
    """
    if isinstance(rule, NativeRule):
        raise NonRegularRule(f"rule {rule.name!r} has no automaton form")
    if method not in ("lazy", "materialize"):
        raise ValueError(f"unknown method {method!r}")
    P = normalize(A)
    if not P.is_sequential:
        raise NotSequential("skyline input is not sequential")
    pairs = cartesian_product(P, rename_dagger(P))
    if isinstance(rule, VariableWiseRule):
        rule = rule.with_alphabet(P.alphabet)
        X = P.variables if rule.variables is None else rule.variables
        if not P.variables <= X:
            raise ValueError("rule variables must cover the automaton's variables")
        alphabet = P.alphabet | rule.template.alphabet
        if method == "lazy":
            identity = builtin_rule("self", alphabet).template
            strict = _strict_pairs(pairs, rule.template, identity, X, alphabet)
            return difference(P, project(strict, X))
        D = rule.instantiate(X)
    else:
        X = rule.variables
        if not P.variables <= X:
            raise ValueError("rule variables must cover the automaton's variables")
        D = rule
        alphabet = P.alphabet | rule.va.alphabet
    identity = builtin_rule("self", alphabet).instantiate(X)
    strict = difference(D.va, identity.va)
    dominated = project(intersection(pairs, strict, method="product"), X)
    return difference(P, dominated)


def _copy_for(template: VA, y: str, alphabet) -> tuple[dict, int, frozenset[int]]:
    """Deterministic transition table of the template renamed to ``y`` and ``y†``."""
    T = order_markers(rename(template, lambda v: dagger(y) if is_dagger(v) else y))
    symbols = sorted(alphabet) + [f(v) for v in (y, dagger(y)) for f in (open_, close)]
    D = determinize(T, symbols)
    return delta(D), D.initial, D.finals


def _strict_pairs(pairs: VA, template: VA, identity: VA, X, alphabet) -> VA:
    """Runs of the pair automaton accepted by every template copy and rejected by some identity copy."""
    pairs = order_markers(pairs)
    names = sorted(X)
    owner = {}
    for i, y in enumerate(names):
        owner[y] = owner[dagger(y)] = i
    rule_copies = [_copy_for(template, y, alphabet) for y in names]
    same_copies = [_copy_for(identity, y, alphabet) for y in names]
    out = pairs.out

    def successors(key):
        p, ts, ss = key
        res = []
        for l, p2 in out[p]:
            if isinstance(l, str):
                t2 = tuple(rule_copies[i][0].get((t, l)) for i, t in enumerate(ts))
                s2 = tuple(same_copies[i][0][(s, l)] for i, s in enumerate(ss))
            else:
                i = owner[l.var]
                t2 = ts[:i] + (rule_copies[i][0].get((ts[i], l)),) + ts[i + 1 :]
                s2 = ss[:i] + (same_copies[i][0][(ss[i], l)],) + ss[i + 1 :]
            if None not in t2:
                res.append((l, (p2, t2, s2)))
        return res

    def is_final(key):
        p, ts, ss = key
        return (
            p in pairs.finals
            and all(t in rule_copies[i][2] for i, t in enumerate(ts))
            and not all(s in same_copies[i][2] for i, s in enumerate(ss))
        )

    init = (pairs.initial, tuple(c[1] for c in rule_copies), tuple(c[1] for c in same_copies))
    variables = frozenset(X) | {dagger(y) for y in X}
    return trim(explore(init, successors, is_final, alphabet, variables))


# -- strict domination pairs ---------------------------------------------------------


@dataclass(frozen=True)
class StrictPair:
    lhs: Span | None
    rhs: Span | None

    @property
    def covering(self) -> Span:
        return covering(self.lhs, self.rhs)

    def to_json(self) -> dict:
        enc = lambda s: None if s is None else [s.begin, s.end]  # noqa: E731
        return {"lhs": enc(self.lhs), "rhs": enc(self.rhs), "covering": enc(self.covering)}


@dataclass(frozen=True)
class RuleAnalysis:
    pairs: tuple[StrictPair, ...]
    max_disjoint: int
    hitting_number: int | None
    hitters: tuple[int, ...] | None
    variable_inclusion_like: bool
    has_empty_rhs: bool

    def to_json(self) -> dict:
        return {
            "pairs": [p.to_json() for p in self.pairs],
            "max_disjoint": self.max_disjoint,
            "hitting_number": self.hitting_number,
            "hitters": None if self.hitters is None else list(self.hitters),
            "variable_inclusion_like": self.variable_inclusion_like,
            "has_empty_rhs": self.has_empty_rhs,
        }


def overlap(s1: Span, s2: Span) -> bool:
    """Whether some nonempty span lies inside both."""
    return max(s1.begin, s2.begin) < min(s1.end, s2.end)


def max_disjoint_spans(spans: Iterable[Span]) -> list[Span]:
    """A largest family of pairwise non-overlapping spans.

    Empty spans overlap nothing and are all taken; the rest is interval
    scheduling by earliest right endpoint.
    """
    spans = list(spans)
    chosen = [s for s in spans if s.begin == s.end]
    last = None
    for s in sorted((s for s in spans if s.begin < s.end), key=lambda s: (s.end, s.begin)):
        if last is None or s.begin >= last:
            chosen.append(s)
            last = s.end
    return chosen


def max_disjoint_pairs(pairs: Iterable[StrictPair]) -> int:
    return len(max_disjoint_spans([p.covering for p in pairs]))


def hitting_set(spans: Iterable[Span]) -> list[int] | None:
    """Fewest positions ``i`` such that every span contains ``[i, i+1>``.

    Greedy point stabbing: scan by right endpoint and stab the last position
    of every span not yet hit.  Returns ``None`` if some span is empty.
    """
    spans = list(spans)
    if any(s.begin == s.end for s in spans):
        return None
    points: list[int] = []
    for s in sorted(spans, key=lambda s: (s.end, s.begin)):
        if not points or not s.begin <= points[-1] < s.end:
            points.append(s.end - 1)
    return points


def strict_pairs(rule: Rule, d: DocLike) -> list[StrictPair]:
    """All strict domination pairs of a single-variable rule on ``d``."""
    text = text_of(d)
    if isinstance(rule, VariableWiseRule):
        rule = rule.with_alphabet(set(text)).on([TEMPLATE_VAR])
    cmp = comparator(rule, text)
    options: list[Span | None] = [None, *spans_of(len(text))]
    out = []
    for s1 in options:
        m1 = Mapping({TEMPLATE_VAR: s1})
        for s2 in options:
            if s1 != s2 and cmp(m1, Mapping({TEMPLATE_VAR: s2})):
                out.append(StrictPair(s1, s2))
    return out


def analyze_rule(rule: Rule | VA, d: DocLike) -> RuleAnalysis:
    """Measure the strict domination pairs of a single-variable rule on ``d``."""
    if isinstance(rule, VA):
        rule = VariableWiseRule(rule)
    pairs = strict_pairs(rule, d)
    inclusion_like = all(p.lhs is None for p in pairs)
    empty_rhs = any(p.rhs is not None and p.rhs.begin == p.rhs.end for p in pairs)
    hitters = None
    if inclusion_like and not empty_rhs:
        hitters = hitting_set(p.rhs for p in pairs)
    return RuleAnalysis(
        tuple(pairs),
        max_disjoint_pairs(pairs),
        None if hitters is None else len(hitters),
        None if hitters is None else tuple(hitters),
        inclusion_like,
        empty_rhs,
    )


def dagger_name(var: str) -> str:
    return dagger(var)
