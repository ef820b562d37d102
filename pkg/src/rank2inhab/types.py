"""Intersection types: syntax, canonical form, rank and size.

Types are immutable trees built from three constructors.  Intersections are
kept in canonical form: flattened, duplicate-free and sorted under a fixed
structural order, so structural equality coincides with equality modulo
associativity, commutativity and idempotence of ``&``.

Concrete syntax (``&`` binds tighter than ``->``, ``->`` associates right)::

    Type   := Arrow
    Arrow  := Inter ("->" Arrow)?
    Inter  := Atomic ("&" Atomic)*
    Atomic := atom | "(" Type ")"
    atom   := [A-Za-z0-9_]+
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Union

__all__ = [
    "Atom",
    "Arrow",
    "Inter",
    "TypeExpr",
    "TypeSyntaxError",
    "arrow_spine",
    "arrows",
    "components",
    "inter",
    "normalize",
    "parse_type",
    "rank",
    "show",
    "size",
    "spines",
]

_ATOM_RE = re.compile(r"[A-Za-z0-9_]+\Z")


class _Type:
    __slots__ = ()

    def __lt__(self, other: "_Type") -> bool:
        return sort_key(self) < sort_key(other)

    def __str__(self) -> str:
        return show(self)  # type: ignore[arg-type]


@dataclass(frozen=True, eq=True, repr=False)
class Atom(_Type):
    name: str

    def __post_init__(self) -> None:
        if not _ATOM_RE.match(self.name):
            raise ValueError(f"invalid atom name {self.name!r}")

    def __repr__(self) -> str:
        return f"Atom({self.name!r})"


@dataclass(frozen=True, eq=True, repr=False)
class Arrow(_Type):
    left: "TypeExpr"
    right: "TypeExpr"

    def __repr__(self) -> str:
        return f"Arrow({self.left!r}, {self.right!r})"


@dataclass(frozen=True, eq=True, repr=False)
class Inter(_Type):
    """Canonical intersection.  Build through :func:`inter` or :func:`normalize`."""

    parts: tuple["TypeExpr", ...]

    def __repr__(self) -> str:
        return f"Inter({', '.join(map(repr, self.parts))})"


TypeExpr = Union[Atom, Arrow, Inter]


@lru_cache(maxsize=None)
def sort_key(t: TypeExpr) -> tuple:
    """Structural total order: Atom < Arrow < Inter, lexicographic within."""
    if isinstance(t, Atom):
        return (0, t.name)
    if isinstance(t, Arrow):
        return (1, sort_key(t.left), sort_key(t.right))
    return (2, tuple(sort_key(p) for p in t.parts))


def inter(parts: Iterable[TypeExpr]) -> TypeExpr:
    """Canonical intersection of already-canonical parts.

    Nested intersections are flattened and duplicates dropped.  A single
    surviving part is returned unwrapped.
    """
    flat: set[TypeExpr] = set()
    for p in parts:
        if isinstance(p, Inter):
            flat.update(p.parts)
        else:
            flat.add(p)
    if not flat:
        raise ValueError("empty intersection")
    if len(flat) == 1:
        return next(iter(flat))
    return Inter(tuple(sorted(flat, key=sort_key)))


def arrows(*types: TypeExpr) -> TypeExpr:
    """Right-nested arrow ``t1 -> t2 -> ... -> tn``."""
    if not types:
        raise ValueError("arrows() needs at least one type")
    result = types[-1]
    for t in reversed(types[:-1]):
        result = Arrow(t, result)
    return result


def normalize(t: TypeExpr) -> TypeExpr:
    """Bring an arbitrary type tree into canonical form (idempotent)."""
    if isinstance(t, Atom):
        return t
    if isinstance(t, Arrow):
        return Arrow(normalize(t.left), normalize(t.right))
    return inter(normalize(p) for p in t.parts)


@lru_cache(maxsize=None)
def rank(t: TypeExpr) -> int:
    if isinstance(t, Atom):
        return 0
    if isinstance(t, Inter):
        return max(1, *(rank(p) for p in t.parts))
    left, right = rank(t.left), rank(t.right)
    if left == 0 and right == 0:
        return 0
    return max(1 + left, right)


@lru_cache(maxsize=None)
def size(t: TypeExpr) -> int:
    """Atom occurrences plus connectives; an n-ary intersection counts n-1."""
    if isinstance(t, Atom):
        return 1
    if isinstance(t, Arrow):
        return 1 + size(t.left) + size(t.right)
    return len(t.parts) - 1 + sum(size(p) for p in t.parts)


def components(t: TypeExpr) -> list[TypeExpr]:
    if isinstance(t, Inter):
        return list(t.parts)
    return [t]


def arrow_spine(t: TypeExpr, k: int) -> Optional[tuple[list[TypeExpr], TypeExpr]]:
    """Split ``b1 -> ... -> bk -> tail``; None if ``t`` has fewer than k arrows."""
    if isinstance(t, Inter):
        raise ValueError("arrow_spine expects a non-intersection type")
    args: list[TypeExpr] = []
    for _ in range(k):
        if not isinstance(t, Arrow):
            return None
        args.append(t.left)
        t = t.right
    return args, t


@lru_cache(maxsize=None)
def spines(t: TypeExpr) -> tuple[tuple[tuple[TypeExpr, ...], TypeExpr], ...]:
    """Every way to use a value of type ``t`` as a head: ``(args, tail)`` pairs.

    A component of an intersection may be chosen at the top and again
    wherever an intersection shows up to the right of an arrow.  Tails are
    never intersections.  Order: component order first, then argument count.
    """
    out: list[tuple[tuple[TypeExpr, ...], TypeExpr]] = []
    if isinstance(t, Inter):
        for p in t.parts:
            out.extend(spines(p))
        return tuple(out)
    out.append(((), t))
    if isinstance(t, Arrow):
        for args, tail in spines(t.right):
            out.append(((t.left, *args), tail))
    return tuple(out)


# -- printing ---------------------------------------------------------------


def show(t: TypeExpr) -> str:
    if isinstance(t, Atom):
        return t.name
    if isinstance(t, Inter):
        return "&".join(_show_atomic(p) for p in t.parts)
    left = _show_atomic(t.left)
    right = show(t.right) if not isinstance(t.right, Inter) else f"({show(t.right)})"
    return f"{left}->{right}"


def _show_atomic(t: TypeExpr) -> str:
    return t.name if isinstance(t, Atom) else f"({show(t)})"


# -- parsing ----------------------------------------------------------------


class TypeSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN_RE = re.compile(r"\s*(?:(->)|([&()])|([A-Za-z0-9_]+))")


def _tokenize(text: str) -> Iterator[tuple[str, int]]:
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            return
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise TypeSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastindex)
        yield m.group(m.lastindex), start
        pos = m.end()


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = list(_tokenize(text))
        self.i = 0

    def peek(self) -> Optional[str]:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def pos(self) -> int:
        return self.tokens[self.i][1] if self.i < len(self.tokens) else len(self.text)

    def take(self, expected: Optional[str] = None) -> str:
        tok = self.peek()
        if tok is None:
            raise TypeSyntaxError("unexpected end of input", self.pos())
        if expected is not None and tok != expected:
            raise TypeSyntaxError(f"expected {expected!r}, found {tok!r}", self.pos())
        self.i += 1
        return tok

    def arrow(self) -> TypeExpr:
        left = self.inter()
        if self.peek() == "->":
            self.take()
            return Arrow(left, self.arrow())
        return left

    def inter(self) -> TypeExpr:
        parts = [self.atomic()]
        while self.peek() == "&":
            self.take()
            parts.append(self.atomic())
        return parts[0] if len(parts) == 1 else inter(parts)

    def atomic(self) -> TypeExpr:
        tok = self.peek()
        if tok == "(":
            self.take()
            t = self.arrow()
            self.take(")")
            return t
        if tok is None or not _ATOM_RE.match(tok):
            where = "end of input" if tok is None else repr(tok)
            raise TypeSyntaxError(f"expected atom or '(', found {where}", self.pos())
        self.take()
        return Atom(tok)


def parse_type(text: str) -> TypeExpr:
    """Parse concrete syntax into a canonical :data:`TypeExpr`."""
    p = _Parser(text)
    if not p.tokens:
        raise TypeSyntaxError("empty type", 0)
    t = p.arrow()
    if p.peek() is not None:
        raise TypeSyntaxError(f"trailing input {p.peek()!r}", p.pos())
    return normalize(t)
