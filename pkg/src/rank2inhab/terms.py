"""Lambda terms, typing environments and explicit typing derivations.

The derivation checker is syntax directed: every node must instantiate one
of the five rules (variable, arrow elimination/introduction, intersection
elimination/introduction) with canonical type equality wherever a rule asks
for two types to coincide.

Derivation text format (see README for an example)::

    env: x:a, y:b->c          # optional first line, root environment
    I_INTER | \\x. x | (a->a)&(b->b)
      I_ARROW | \\x. x | a->a
        VAR | x | a
      ...

Each node is ``RULE | term | type`` indented by two spaces per depth level.
Premise environments are not written out: they equal the parent's, except
below ``I_ARROW`` where the binder is added with the argument type of the
conclusion.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

from .types import Arrow, Inter, TypeExpr, inter, parse_type, show

__all__ = [
    "App",
    "Derivation",
    "DerivationFormatError",
    "Env",
    "Lam",
    "Rule",
    "Term",
    "TermSize",
    "TermSyntaxError",
    "Var",
    "Violation",
    "alpha_equal",
    "apply",
    "check_derivation",
    "derivation_size",
    "dump_derivation",
    "lams",
    "load_derivation",
    "parse_term",
    "show_term",
    "term_depth",
    "term_size",
]


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return show_term(self)


@dataclass(frozen=True)
class Lam:
    binder: str
    body: "Term"

    def __str__(self) -> str:
        return show_term(self)


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"

    def __str__(self) -> str:
        return show_term(self)


Term = Union[Var, Lam, App]


def apply(head: Term, *args: Term) -> Term:
    for a in args:
        head = App(head, a)
    return head


def lams(binders: Iterable[str], body: Term) -> Term:
    for b in reversed(list(binders)):
        body = Lam(b, body)
    return body


def head_and_args(t: Term) -> tuple[Term, list[Term]]:
    args: list[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


# -- printing and parsing ---------------------------------------------------


def show_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Lam):
        binders = []
        while isinstance(t, Lam):
            binders.append(t.binder)
            t = t.body
        return "\\" + " ".join(binders) + ". " + show_term(t)
    head, args = head_and_args(t)
    parts = [_show_operand(head)] + [_show_operand(a) for a in args]
    return " ".join(parts)


def _show_operand(t: Term) -> str:
    return t.name if isinstance(t, Var) else f"({show_term(t)})"


class TermSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TERM_TOKEN = re.compile(r"\s*(?:([\\λ().])|([A-Za-z0-9_']+))")


def parse_term(text: str) -> Term:
    """Parse ``\\x1 x2. body`` / juxtaposition syntax (``λ`` also accepted)."""
    tokens: list[tuple[str, int]] = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TERM_TOKEN.match(text, pos)
        if not m:
            raise TermSyntaxError(f"unexpected character {text[pos]!r}", pos)
        tokens.append((m.group(m.lastindex), m.start(m.lastindex)))
        pos = m.end()
    if not tokens:
        raise TermSyntaxError("empty term", 0)
    i = 0

    def peek() -> Optional[str]:
        return tokens[i][0] if i < len(tokens) else None

    def where() -> int:
        return tokens[i][1] if i < len(tokens) else len(text)

    def expect(tok: str) -> None:
        nonlocal i
        if peek() != tok:
            raise TermSyntaxError(f"expected {tok!r}", where())
        i += 1

    def term() -> Term:
        nonlocal i
        if peek() in ("\\", "λ"):
            i += 1
            binders = []
            while peek() not in (None, ".", "\\", "λ", "(", ")"):
                binders.append(peek())
                i += 1
            if not binders:
                raise TermSyntaxError("abstraction without binder", where())
            expect(".")
            return lams(binders, term())
        head = operand()
        while peek() not in (None, ")"):
            if peek() in ("\\", "λ"):
                head = App(head, term())
                break
            head = App(head, operand())
        return head

    def operand() -> Term:
        nonlocal i
        tok = peek()
        if tok == "(":
            i += 1
            t = term()
            expect(")")
            return t
        if tok is None or tok in (")", "."):
            raise TermSyntaxError("expected variable or '('", where())
        i += 1
        return Var(tok)

    t = term()
    if i != len(tokens):
        raise TermSyntaxError(f"trailing input {peek()!r}", where())
    return t


# -- measures ---------------------------------------------------------------


@dataclass(frozen=True)
class TermSize:
    applications: int
    nodes: int


def term_size(t: Term) -> TermSize:
    apps = nodes = 0
    stack = [t]
    while stack:
        u = stack.pop()
        nodes += 1
        if isinstance(u, App):
            apps += 1
            stack += [u.fun, u.arg]
        elif isinstance(u, Lam):
            stack.append(u.body)
    return TermSize(apps, nodes)


def term_depth(t: Term) -> int:
    """Nesting depth of head-variable applications; abstractions are free.

    ``x`` has depth 1 and ``x M1 ... Mk`` has depth ``1 + max depth(Mi)``.
    This is the measure bounded by the brute-force enumerator and minimised
    by the solver.
    """
    if isinstance(t, Lam):
        return term_depth(t.body)
    head, args = head_and_args(t)
    below = 1 + max((term_depth(a) for a in args), default=0)
    return below if isinstance(head, Var) else max(below, term_depth(head))


def alpha_equal(s: Term, t: Term) -> bool:
    def go(s: Term, t: Term, env_s: dict, env_t: dict, level: int) -> bool:
        if isinstance(s, Var) and isinstance(t, Var):
            ls, lt = env_s.get(s.name), env_t.get(t.name)
            if ls is None and lt is None:
                return s.name == t.name
            return ls == lt
        if isinstance(s, Lam) and isinstance(t, Lam):
            return go(
                s.body,
                t.body,
                {**env_s, s.binder: level},
                {**env_t, t.binder: level},
                level + 1,
            )
        if isinstance(s, App) and isinstance(t, App):
            return go(s.fun, t.fun, env_s, env_t, level) and go(
                s.arg, t.arg, env_s, env_t, level
            )
        return False

    return go(s, t, {}, {}, 0)


# -- environments -----------------------------------------------------------


@dataclass(frozen=True)
class Env:
    """Ordered typing environment with distinct names."""

    decls: tuple[tuple[str, TypeExpr], ...] = ()

    def __post_init__(self) -> None:
        names = [n for n, _ in self.decls]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate declaration in environment: {names}")

    def lookup(self, name: str) -> Optional[TypeExpr]:
        for n, t in self.decls:
            if n == name:
                return t
        return None

    def extend(self, name: str, t: TypeExpr) -> "Env":
        return Env(self.decls + ((name, t),))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.decls)

    @property
    def types(self) -> tuple[TypeExpr, ...]:
        return tuple(t for _, t in self.decls)

    def __contains__(self, name: str) -> bool:
        return self.lookup(name) is not None

    def __len__(self) -> int:
        return len(self.decls)

    def __str__(self) -> str:
        return ", ".join(f"{n}:{show(t)}" for n, t in self.decls)


# -- derivations ------------------------------------------------------------


class Rule:
    VAR = "VAR"
    E_ARROW = "E_ARROW"
    I_ARROW = "I_ARROW"
    E_INTER_L = "E_INTER_L"
    E_INTER_R = "E_INTER_R"
    I_INTER = "I_INTER"

    ALL = (VAR, E_ARROW, I_ARROW, E_INTER_L, E_INTER_R, I_INTER)
    ARITY = {VAR: 0, E_ARROW: 2, I_ARROW: 1, E_INTER_L: 1, E_INTER_R: 1, I_INTER: 2}


@dataclass(frozen=True)
class Derivation:
    rule: str
    env: Env
    term: Term
    type: TypeExpr
    premises: tuple["Derivation", ...] = ()


@dataclass(frozen=True)
class Violation:
    rule: str
    path: tuple[int, ...]
    reason: str

    def __str__(self) -> str:
        where = ".".join(map(str, self.path)) or "root"
        return f"{where}: {self.rule}: {self.reason}"


def _same_env(a: Env, b: Env) -> bool:
    return dict(a.decls) == dict(b.decls)


def _check_node(d: Derivation) -> Optional[str]:
    rule, ps = d.rule, d.premises
    if rule not in Rule.ARITY:
        return f"unknown rule tag {rule!r}"
    if len(ps) != Rule.ARITY[rule]:
        return f"expected {Rule.ARITY[rule]} premises, found {len(ps)}"

    if rule == Rule.VAR:
        if not isinstance(d.term, Var):
            return "term is not a variable"
        declared = d.env.lookup(d.term.name)
        if declared is None:
            return f"{d.term.name} is not declared"
        if declared != d.type:
            return f"{d.term.name} is declared {show(declared)}, not {show(d.type)}"
        return None

    if rule == Rule.I_ARROW:
        (p,) = ps
        if not isinstance(d.term, Lam):
            return "term is not an abstraction"
        if not isinstance(d.type, Arrow):
            return "type is not an arrow"
        if d.term.binder in d.env:
            return f"binder {d.term.binder} already declared"
        if not _same_env(p.env, d.env.extend(d.term.binder, d.type.left)):
            return "premise environment must extend the conclusion's with the binder"
        if p.term != d.term.body:
            return "premise term is not the abstraction body"
        if p.type != d.type.right:
            return "premise type is not the arrow's result"
        return None

    if any(not _same_env(p.env, d.env) for p in ps):
        return "premise environment differs from conclusion"

    if rule == Rule.E_ARROW:
        f, a = ps
        if not isinstance(d.term, App):
            return "term is not an application"
        if f.term != d.term.fun or a.term != d.term.arg:
            return "premise terms do not match the application"
        if not isinstance(f.type, Arrow):
            return f"function premise has non-arrow type {show(f.type)}"
        if f.type.right != d.type:
            return "arrow result differs from conclusion type"
        if f.type.left != a.type:
            return "argument type differs from arrow domain"
        return None

    if rule in (Rule.E_INTER_L, Rule.E_INTER_R):
        (p,) = ps
        if p.term != d.term:
            return "premise term differs"
        if not isinstance(p.type, Inter):
            return "premise type is not an intersection"
        if d.type not in p.type.parts:
            return f"{show(d.type)} is not a part of {show(p.type)}"
        return None

    # I_INTER
    l, r = ps
    if l.term != d.term or r.term != d.term:
        return "premise terms differ from conclusion"
    if inter([l.type, r.type]) != d.type:
        return "conclusion is not the intersection of the premise types"
    return None


def check_derivation(d: Derivation) -> list[Violation]:
    """All rule violations in ``d``; an empty list means the derivation is valid."""
    out: list[Violation] = []
    stack: list[tuple[Derivation, tuple[int, ...]]] = [(d, ())]
    while stack:
        node, path = stack.pop()
        reason = _check_node(node)
        if reason is not None:
            out.append(Violation(node.rule, path, reason))
        for i, p in enumerate(node.premises):
            stack.append((p, path + (i,)))
    out.sort(key=lambda v: v.path)
    return out


def derivation_size(d: Derivation) -> int:
    n, stack = 0, [d]
    while stack:
        u = stack.pop()
        n += 1
        stack.extend(u.premises)
    return n


# -- derivation files -------------------------------------------------------


def _dump_lines(d: Derivation, depth: int) -> Iterator[str]:
    stack = [(d, depth)]
    while stack:
        node, k = stack.pop()
        yield f"{'  ' * k}{node.rule} | {show_term(node.term)} | {show(node.type)}"
        for p in reversed(node.premises):
            stack.append((p, k + 1))


def dump_derivation(d: Derivation) -> str:
    lines = []
    if d.env.decls:
        lines.append(f"env: {d.env}")
    lines.extend(_dump_lines(d, 0))
    return "\n".join(lines) + "\n"


class DerivationFormatError(ValueError):
    pass


def _parse_env(text: str) -> Env:
    decls = []
    for item in filter(None, (s.strip() for s in _split_top(text))):
        name, sep, ty = item.partition(":")
        if not sep:
            raise DerivationFormatError(f"bad declaration {item!r}")
        decls.append((name.strip(), parse_type(ty)))
    return Env(tuple(decls))


def _split_top(text: str) -> list[str]:
    # commas inside parentheses never occur in types, but keep it robust
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def load_derivation(text: str) -> Derivation:
    """Inverse of :func:`dump_derivation`.

    Raises :class:`DerivationFormatError` (or a syntax error from the term or
    type parser) on malformed input.  Rule tags are not validated here; an
    unknown tag is reported by :func:`check_derivation`.
    """
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    root_env = Env()
    if lines and lines[0].startswith("env:"):
        root_env = _parse_env(lines[0][4:])
        lines = lines[1:]
    if not lines:
        raise DerivationFormatError("no derivation nodes")

    rows = []
    for ln in lines:
        stripped = ln.lstrip(" ")
        indent = len(ln) - len(stripped)
        if indent % 2:
            raise DerivationFormatError(f"odd indentation: {ln!r}")
        fields = [f.strip() for f in stripped.split("|")]
        if len(fields) != 3:
            raise DerivationFormatError(f"expected 'rule | term | type': {ln!r}")
        rows.append((indent // 2, fields[0], parse_term(fields[1]), parse_type(fields[2])))

    if rows[0][0] != 0:
        raise DerivationFormatError("root node must not be indented")

    pos = 0

    def build(env: Env, depth: int) -> Derivation:
        nonlocal pos
        k, rule, term, ty = rows[pos]
        pos += 1
        child_env = env
        if rule == Rule.I_ARROW and isinstance(term, Lam) and isinstance(ty, Arrow):
            if term.binder not in env:
                child_env = env.extend(term.binder, ty.left)
        premises = []
        while pos < len(rows) and rows[pos][0] > depth:
            if rows[pos][0] != depth + 1:
                raise DerivationFormatError(f"indentation jumps at node {pos + 1}")
            premises.append(build(child_env, depth + 1))
        return Derivation(rule, env, term, ty, tuple(premises))

    d = build(root_env, 0)
    if pos != len(rows):
        raise DerivationFormatError("more than one root node")
    return d
