"""Domination rules and per-document partial-order checks."""

from __future__ import annotations

import json
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from itertools import product
from pathlib import Path

from .autops import VA, cartesian_product, reduce_states, rename, universal
from .evaluation import contains, evaluate
from .regex import compile as compile_formula
from .regex import sigma_star
from .spancore import (
    DocLike,
    Mapping,
    Span,
    compatible,
    dagger,
    dagger_mapping,
    is_dagger,
    merge,
    span_included,
    spans_of,
    text_of,
    undagger,
)

TEMPLATE_VAR = "x"
Comparator = Callable[[Mapping, Mapping], bool]


class DominationDomainError(ValueError):
    """A mapping uses a variable the rule does not speak about."""


class NonRegularRule(ValueError):
    """The rule has no automaton form."""


@dataclass(frozen=True)
class RegularRule:
    """A spanner over ``X`` and its dagger copy; ``(m1, m2)`` is in the relation
    iff the spanner produces ``m1`` merged with the dagger copy of ``m2``."""

    va: VA
    variables: frozenset[str]
    name: str = "regular"

    def __post_init__(self) -> None:
        allowed = self.variables | {dagger(v) for v in self.variables}
        extra = self.va.variables - allowed
        if extra:
            raise ValueError(f"rule automaton uses variables outside X and X†: {sorted(extra)}")

    @classmethod
    def from_va(cls, va: VA, name: str = "regular") -> "RegularRule":
        return cls(va, frozenset(undagger(v) for v in va.variables), name)


@dataclass(frozen=True)
class VariableWiseRule:
    """A single-variable template over ``x`` and ``x†`` applied to every variable."""

    template: VA
    name: str = "template"
    variables: frozenset[str] | None = None
    builtin: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        extra = self.template.variables - {TEMPLATE_VAR, dagger(TEMPLATE_VAR)}
        if extra:
            raise ValueError(f"template may only use x and x!, found {sorted(extra)}")

    @classmethod
    def from_regex(cls, text: str, name: str = "template", alphabet: Iterable[str] = ()) -> "VariableWiseRule":
        return cls(compile_formula(text, alphabet), name)

    def on(self, variables: Iterable[str]) -> "VariableWiseRule":
        return VariableWiseRule(self.template, self.name, frozenset(variables), self.builtin)

    def with_alphabet(self, alphabet: Iterable[str]) -> "VariableWiseRule":
        alphabet = frozenset(alphabet)
        if not self.builtin or alphabet <= self.template.alphabet:
            return self
        fresh = builtin_rule(self.name, self.template.alphabet | alphabet)
        return VariableWiseRule(fresh.template, self.name, self.variables, True)

    def instantiate(self, variables: Iterable[str] | None = None) -> RegularRule:
        X = frozenset(variables) if variables is not None else self.variables
        if X is None:
            raise ValueError("no target variables given")
        return RegularRule(instantiate_variable_wise(self.template, X), X, self.name)


@dataclass(frozen=True)
class NativeRule:
    """A comparator given as a Python predicate ``(text, m1, m2) -> bool``."""

    name: str
    predicate: Callable[[str, Mapping, Mapping], bool]
    variables: frozenset[str] | None = None

    def on(self, variables: Iterable[str]) -> "NativeRule":
        return NativeRule(self.name, self.predicate, frozenset(variables))


Rule = RegularRule | VariableWiseRule | NativeRule


# -- built-in rules ------------------------------------------------------------

BUILTIN_NAMES = ("self", "varinc", "spaninc", "ltr", "spanlen")


def template_text(name: str, alphabet: Iterable[str] = ("a", "b")) -> str:
    """Formula text of a built-in single-variable template."""
    S = sigma_star(alphabet)
    self_ = f"{S} x!{{x{{{S}}}}} {S} | {S}"
    texts = {
        "self": self_,
        "spaninc": f"{S} x!{{{S} x{{{S}}} {S}}} {S} | {S}",
        "ltr": f"{S} x!{{x{{{S}}} {S}}} {S} | {S}",
        "varinc": f"{S} x!{{{S}}} {S} | {self_}",
    }
    key = name.lower()
    if key not in texts:
        raise KeyError(f"no regular template named {name!r}")
    return texts[key]


def _same_domain(m1: Mapping, m2: Mapping) -> bool:
    return m1.domain == m2.domain


def _native_self(_: str, m1: Mapping, m2: Mapping) -> bool:
    return m1 == m2


def _native_varinc(_: str, m1: Mapping, m2: Mapping) -> bool:
    return m1.domain <= m2.domain and compatible(m1, m2)


def _native_spaninc(_: str, m1: Mapping, m2: Mapping) -> bool:
    return _same_domain(m1, m2) and all(span_included(s, m2[v]) for v, s in m1.items())


def _native_ltr(_: str, m1: Mapping, m2: Mapping) -> bool:
    return _same_domain(m1, m2) and all(
        s.begin == m2[v].begin and s.end <= m2[v].end for v, s in m1.items()
    )


def _native_spanlen(_: str, m1: Mapping, m2: Mapping) -> bool:
    if not _same_domain(m1, m2):
        return False
    if any(m2[v].length < s.length for v, s in m1.items()):
        return False
    # equal lengths everywhere: only the mapping itself, to stay antisymmetric
    return m1 == m2 or any(m2[v].length > s.length for v, s in m1.items())


NATIVE = {
    "self": _native_self,
    "varinc": _native_varinc,
    "spaninc": _native_spaninc,
    "ltr": _native_ltr,
    "spanlen": _native_spanlen,
}


def native_rule(name: str) -> NativeRule:
    return NativeRule(name.lower(), NATIVE[name.lower()])


def builtin_rule(name: str, alphabet: Iterable[str] = ("a", "b")) -> Rule:
    """Regular template for self/varinc/spaninc/ltr; native comparator for spanlen."""
    key = name.lower()
    if key == "spanlen":
        return native_rule(key)
    return _builtin_template(key, frozenset(alphabet))


@lru_cache(maxsize=64)
def _builtin_template(key: str, alphabet: frozenset[str]) -> VariableWiseRule:
    return VariableWiseRule(compile_formula(template_text(key, alphabet), alphabet), key, None, True)


def instantiate_variable_wise(template: VA, variables: Iterable[str]) -> VA:
    """Product of one renamed copy of the template per target variable."""
    copies = []
    for y in sorted(variables):
        copies.append(rename(template, lambda v, y=y: dagger(y) if is_dagger(v) else y))
    if not copies:
        return universal(template.alphabet)
    return reduce(lambda a, b: reduce_states(cartesian_product(a, b)), copies)


def load_rule(spec: str, alphabet: Iterable[str] = ("a", "b")) -> Rule:
    """Resolve a rule name or ``file:<path>``.

    Rule files are JSON objects ``{"kind": "variable-wise", "regex": ...}`` or
    ``{"kind": "explicit", "va": {...}}`` / ``{"kind": "explicit", "regex": ...}``,
    or plain text whose first line is ``# variable-wise`` or ``# explicit``
    followed by a formula.
    """
    alphabet = frozenset(alphabet)
    if not spec.startswith("file:"):
        if spec.lower() not in BUILTIN_NAMES:
            raise ValueError(f"unknown rule {spec!r}")
        return builtin_rule(spec, alphabet)
    path = Path(spec[5:])
    text = path.read_text(encoding="utf-8")
    name = path.stem
    try:
        obj = json.loads(text)
    except json.JSONDecodeError:
        header, _, body = text.partition("\n")
        kind = header.lstrip("#").strip().lower()
        obj = {"kind": kind, "regex": body.strip()}
    if not isinstance(obj, dict):
        raise ValueError("rule file must hold a JSON object or a headed formula")
    kind = obj.get("kind")
    if kind == "variable-wise":
        return VariableWiseRule.from_regex(obj["regex"], name, alphabet)
    if kind == "explicit":
        va = VA.from_json(obj["va"]) if "va" in obj else compile_formula(obj["regex"], alphabet)
        return RegularRule.from_va(va, name)
    raise ValueError(f"rule file kind must be variable-wise or explicit, got {kind!r}")


# -- domination tests ----------------------------------------------------------------


def rule_variables(rule: Rule) -> frozenset[str] | None:
    return rule.variables


def _check_domain(rule: Rule, m1: Mapping, m2: Mapping) -> None:
    X = rule_variables(rule)
    if X is None:
        return
    extra = (m1.domain | m2.domain) - X
    if extra:
        raise DominationDomainError(f"variables outside the rule: {sorted(extra)}")


def _check_letters(rule: Rule, text: str) -> None:
    va = rule.va if isinstance(rule, RegularRule) else getattr(rule, "template", None)
    if va is not None and not set(text) <= va.alphabet:
        raise ValueError(f"document letters {sorted(set(text) - va.alphabet)} outside the rule alphabet")


def _template_pair(y: str, m1: Mapping, m2: Mapping) -> Mapping:
    return Mapping({TEMPLATE_VAR: m1.get(y), dagger(TEMPLATE_VAR): m2.get(y)})


def dominates(rule: Rule, d: DocLike, m1: Mapping, m2: Mapping) -> bool:
    """Whether ``m1`` is dominated by (or equal to) ``m2`` on ``d``."""
    text = text_of(d)
    m1, m2 = Mapping(m1), Mapping(m2)
    _check_domain(rule, m1, m2)
    if isinstance(rule, NativeRule):
        return rule.predicate(text, m1, m2)
    _check_letters(rule, text)
    if isinstance(rule, RegularRule):
        return contains(rule.va, text, merge(m1, dagger_mapping(m2)))
    X = rule.variables if rule.variables is not None else m1.domain | m2.domain
    return all(contains(rule.template, text, _template_pair(y, m1, m2)) for y in X)


def comparator(rule: Rule, d: DocLike) -> Comparator:
    """A fast ``(m1, m2) -> bool`` equivalent to :func:`dominates` on one document."""
    text = text_of(d)
    if isinstance(rule, NativeRule):
        pred = rule.predicate

        def cmp_native(m1: Mapping, m2: Mapping) -> bool:
            _check_domain(rule, m1, m2)
            return pred(text, m1, m2)

        return cmp_native
    _check_letters(rule, text)
    if isinstance(rule, VariableWiseRule):
        xd = dagger(TEMPLATE_VAR)
        pairs = {(m.get(TEMPLATE_VAR), m.get(xd)) for m in evaluate(rule.template, text)}
        fixed = rule.variables

        def cmp(m1: Mapping, m2: Mapping) -> bool:
            _check_domain(rule, m1, m2)
            X = fixed if fixed is not None else m1.domain | m2.domain
            return all((m1.get(y), m2.get(y)) in pairs for y in X)

        return cmp
    cache: dict[tuple[Mapping, Mapping], bool] = {}
    if len(rule.variables) <= 2:
        table = evaluate(rule.va, text)

        def member(m: Mapping) -> bool:
            return m in table
    else:

        def member(m: Mapping) -> bool:
            return contains(rule.va, text, m)

    def cmp_regular(m1: Mapping, m2: Mapping) -> bool:
        key = (m1, m2)
        if key not in cache:
            _check_domain(rule, m1, m2)
            cache[key] = member(merge(m1, dagger_mapping(m2)))
        return cache[key]

    return cmp_regular


# -- validation ------------------------------------------------------------------------


@dataclass
class RuleReport:
    reflexive: bool
    antisymmetric: bool
    transitive: bool
    violations: list[str]
    checked: int

    @property
    def ok(self) -> bool:
        return self.reflexive and self.antisymmetric and self.transitive

    def to_json(self) -> dict:
        return {
            "reflexive": self.reflexive,
            "antisymmetric": self.antisymmetric,
            "transitive": self.transitive,
            "violations": self.violations,
            "checked": self.checked,
        }


def all_mappings(variables: Iterable[str], n: int) -> list[Mapping]:
    """Every mapping over ``variables`` whose spans fit a document of length ``n``."""
    variables = sorted(variables)
    options: list[Span | None] = [None, *spans_of(n)]
    return [Mapping(zip(variables, combo)) for combo in product(options, repeat=len(variables))]


def _default_check_vars(rule: Rule) -> frozenset[str]:
    if rule.variables is not None:
        return rule.variables
    return frozenset([TEMPLATE_VAR])


def validate_rule(
    rule: Rule,
    d: DocLike,
    variables: Iterable[str] | None = None,
    mode: str = "exhaustive",
    max_violations: int = 20,
) -> RuleReport:
    """Check reflexivity, antisymmetry and transitivity of the rule on ``d``.

    ``exhaustive`` ranges over every mapping of the checked variables;
    ``relation`` only over the mappings that occur in the materialized relation.
    """
    text = text_of(d)
    X = frozenset(variables) if variables is not None else _default_check_vars(rule)
    if isinstance(rule, VariableWiseRule) and rule.variables is None:
        rule = rule.on(X)
    cmp = comparator(rule, text)
    universe = all_mappings(X, len(text))
    if mode == "relation":
        support = set()
        for a in universe:
            for b in universe:
                if a != b and cmp(a, b):
                    support.update((a, b))
        universe = sorted(support)
    elif mode != "exhaustive":
        raise ValueError(f"unknown mode {mode!r}")
    index = {m: i for i, m in enumerate(universe)}
    above = [{index[b] for b in universe if cmp(a, b)} for a in universe]
    violations: list[str] = []

    def note(msg: str) -> None:
        if len(violations) < max_violations:
            violations.append(msg)

    reflexive = antisymmetric = transitive = True
    for i, a in enumerate(universe):
        if i not in above[i]:
            reflexive = False
            note(f"reflexivity: {a!r} does not dominate itself")
        for j in above[i]:
            if j > i and i in above[j]:
                antisymmetric = False
                note(f"antisymmetry: {a!r} and {universe[j]!r} dominate each other")
            for k in above[j]:
                if k not in above[i]:
                    transitive = False
                    note(f"transitivity: {a!r} <= {universe[j]!r} <= {universe[k]!r}")
    return RuleReport(reflexive, antisymmetric, transitive, violations, len(universe))
