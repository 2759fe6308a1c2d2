"""Regex formulas with variable captures: parsing, printing, compilation.

Surface syntax::

    formula := alt
    alt     := cat ('|' cat)*
    cat     := star+
    star    := atom '*'*
    atom    := 'empty' | 'eps' | CHAR | VAR '{' alt '}' | '(' alt ')'

Whitespace between tokens is ignored.  A variable is an identifier
immediately followed (up to whitespace) by ``{``; a trailing ``!`` marks the
dagger copy of a variable.  When the identifier is glued to the preceding
atom (``a*bx{a*}``), its leading characters are letters and the variable name
starts at its last alphabetic character; longer names need a separating space
or bracket.  Any other character is a letter; metacharacters and whitespace
are escaped with a backslash.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from typing import Union

from .autops import VA, check_sequential, reduce_states
from .spancore import DAGGER, close, open_

METACHARS = set("|*(){}\\!") | {"ε", "∅", "∨", DAGGER}


class RegexSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownLetter(ValueError):
    pass


class NonSequentialFormula(ValueError):
    """Some match of the formula assigns a variable twice."""


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Epsilon:
    pass


@dataclass(frozen=True)
class Letter:
    char: str


@dataclass(frozen=True)
class Concat:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Alt:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Star:
    inner: "Formula"


@dataclass(frozen=True)
class Capture:
    var: str
    inner: "Formula"


Formula = Union[Empty, Epsilon, Letter, Concat, Alt, Star, Capture]


def concat_all(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return Epsilon()
    out = parts[0]
    for p in parts[1:]:
        out = Concat(out, p)
    return out


def alt_all(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return Empty()
    out = parts[0]
    for p in parts[1:]:
        out = Alt(out, p)
    return out


def children(e: Formula) -> tuple:
    if isinstance(e, (Concat, Alt)):
        return (e.left, e.right)
    if isinstance(e, (Star, Capture)):
        return (e.inner,)
    return ()


def size(e: Formula) -> int:
    return 1 + sum(size(c) for c in children(e))


def variables_of(e: Formula) -> frozenset[str]:
    own = {e.var} if isinstance(e, Capture) else set()
    return frozenset(own).union(*(variables_of(c) for c in children(e)))


def letters_of(e: Formula) -> frozenset[str]:
    own = {e.char} if isinstance(e, Letter) else set()
    return frozenset(own).union(*(letters_of(c) for c in children(e)))


# -- parsing -------------------------------------------------------------------


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.pos = 0

    def skip(self) -> None:
        while self.pos < len(self.src) and self.src[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str | None:
        self.skip()
        return self.src[self.pos] if self.pos < len(self.src) else None

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise RegexSyntaxError(f"expected {ch!r}", self.pos)
        self.pos += 1

    def alt(self) -> Formula:
        e = self.cat()
        while self.peek() in ("|", "∨"):
            self.pos += 1
            e = Alt(e, self.cat())
        return e

    def cat(self) -> Formula:
        e = self.star()
        while self.peek() not in (None, "|", "∨", ")", "}"):
            e = Concat(e, self.star())
        return e

    def star(self) -> Formula:
        e = self.atom()
        while self.peek() == "*":
            self.pos += 1
            e = Star(e)
        return e

    def atom(self) -> Formula:
        ch = self.peek()
        start = self.pos
        if ch is None:
            raise RegexSyntaxError("unexpected end of input", start)
        if ch == "(":
            self.pos += 1
            e = self.alt()
            self.expect(")")
            return e
        if ch == "\\":
            if start + 1 >= len(self.src):
                raise RegexSyntaxError("dangling escape", start)
            self.pos += 2
            return Letter(self.src[start + 1])
        if ch == "ε":
            self.pos += 1
            return Epsilon()
        if ch == "∅":
            self.pos += 1
            return Empty()
        if ch.isalpha() and ch.isascii() or ch == "_":
            end = start + 1
            while end < len(self.src) and (self.src[end].isascii() and self.src[end].isalnum() or self.src[end] == "_"):
                end += 1
            name = self.src[start:end]
            if end < len(self.src) and self.src[end] in ("!", DAGGER):
                name += DAGGER
                end += 1
            self.pos = end
            if self.peek() == "{":
                # glued to the previous atom ("a*bx{...}"): leading characters are letters
                base = name.rstrip(DAGGER)
                glued = start > 0 and not self.src[start - 1].isspace() and self.src[start - 1] not in "(|{∨"
                if glued and any(c.isalpha() or c == "_" for c in base[1:]):
                    self.pos = start + 1
                    return Letter(ch)
                self.pos += 1
                inner = self.alt()
                self.expect("}")
                return Capture(name, inner)
            if name == "eps":
                return Epsilon()
            if name == "empty":
                return Empty()
            if name.endswith(DAGGER):
                raise RegexSyntaxError("dagger variable without capture", end - 1)
            self.pos = start + 1
            return Letter(ch)
        if ch in METACHARS:
            raise RegexSyntaxError(f"unexpected {ch!r}", start)
        self.pos += 1
        return Letter(ch)


def parse(src: str, alphabet: Iterable[str] | None = None) -> Formula:
    """Parse formula text; with ``alphabet`` given, letters outside it are rejected."""
    p = _Parser(src)
    e = p.alt()
    if p.peek() is not None:
        raise RegexSyntaxError(f"unexpected {p.peek()!r}", p.pos)
    if alphabet is not None:
        bad = sorted(letters_of(e) - set(alphabet))
        if bad:
            raise UnknownLetter(f"letters outside the alphabet: {''.join(bad)!r}")
    return e


# -- printing ------------------------------------------------------------------


def _letter_text(c: str) -> str:
    return "\\" + c if c in METACHARS or c.isspace() else c


def _var_text(v: str) -> str:
    return v[: -len(DAGGER)] + "!" if v.endswith(DAGGER) else v


def to_text(e: Formula) -> str:
    """Render a formula so that :func:`parse` gives it back."""
    return _show(e, 0)


def _show(e: Formula, ctx: int) -> str:
    # precedence: 0 alternation, 1 concatenation, 2 star operand
    if isinstance(e, Empty):
        return "empty"
    if isinstance(e, Epsilon):
        return "eps"
    if isinstance(e, Letter):
        return _letter_text(e.char)
    if isinstance(e, Capture):
        return f"{_var_text(e.var)}{{{_show(e.inner, 0)}}}"
    if isinstance(e, Star):
        return _show(e.inner, 2) + "*"
    if isinstance(e, Concat):
        text = _show(e.left, 1) + " " + _show(e.right, 2 if isinstance(e.right, Concat) else 1)
        return f"({text})" if ctx > 1 else text
    if isinstance(e, Alt):
        text = _show(e.left, 0) + " | " + _show(e.right, 1 if isinstance(e.right, Alt) else 0)
        return f"({text})" if ctx > 0 else text
    raise TypeError(f"not a formula: {e!r}")


# -- compilation ----------------------------------------------------------------


def compile(e: Formula | str, alphabet: Iterable[str] | None = None) -> VA:  # noqa: A001
    """Translate a formula into a trimmed, epsilon-free sequential automaton with bisimilar states merged."""
    if isinstance(e, str):
        e = parse(e)
    transitions: list = []
    counter = [0]

    def fresh() -> int:
        counter[0] += 1
        return counter[0] - 1

    def build(f: Formula) -> tuple[int, int]:
        s, t = fresh(), fresh()
        if isinstance(f, Epsilon):
            transitions.append((s, None, t))
        elif isinstance(f, Letter):
            transitions.append((s, f.char, t))
        elif isinstance(f, Concat):
            s1, t1 = build(f.left)
            s2, t2 = build(f.right)
            transitions.extend([(s, None, s1), (t1, None, s2), (t2, None, t)])
        elif isinstance(f, Alt):
            for part in (f.left, f.right):
                s1, t1 = build(part)
                transitions.extend([(s, None, s1), (t1, None, t)])
        elif isinstance(f, Star):
            s1, t1 = build(f.inner)
            transitions.extend([(s, None, t), (s, None, s1), (t1, None, s1), (t1, None, t)])
        elif isinstance(f, Capture):
            s1, t1 = build(f.inner)
            transitions.extend([(s, open_(f.var), s1), (t1, close(f.var), t)])
        elif not isinstance(f, Empty):
            raise TypeError(f"not a formula: {f!r}")
        return s, t

    start, end = build(e)
    letters = letters_of(e) | frozenset(alphabet or ())
    A = VA(letters, variables_of(e), counter[0], start, frozenset([end]), tuple(transitions))
    A = reduce_states(A)
    if not check_sequential(A)[0]:
        raise NonSequentialFormula("a variable can be assigned twice or left open on one match")
    return A


def escape(text: str) -> str:
    return "".join(_letter_text(c) for c in text)


def sigma_star(alphabet: Iterable[str]) -> str:
    """Formula text for any word over ``alphabet``."""
    letters = sorted(alphabet)
    if not letters:
        return "eps"
    return "(" + " | ".join(_letter_text(a) for a in letters) + ")*"
