"""Rank-two types that encode computations.

:func:`gen_t` builds the family ``T(n)`` whose unique inhabitant has
``2**n - 1`` applications.  :func:`reduce` compiles an alternating linear
bounded automaton and an input word of length n into a type with ``n + 2``
intersection rows (one per tape cell, one for the head position, one for
the machine state) such that the type is inhabited exactly when the machine
accepts the word in place.

Reading a generated type as a table, rows are the components of the outer
intersection and columns are argument positions.  Every column becomes one
bound variable of the inhabitant, and one application of that variable is
one machine step.  Atoms are namespaced per row kind: tape symbols
``s0 s1 sF``, head positions ``p0 .. pN``, machine states by their own
names plus ``q_acc``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .alba import Kind, Machine, MachineError, Transition
from .types import Atom, TypeExpr, arrows, inter

__all__ = [
    "ColumnSpec",
    "Q_ACC",
    "columns",
    "gen_t",
    "reduce",
    "row_types",
]

ALPHA = Atom("a")
BETA = Atom("b")

SYM = {"0": Atom("s0"), "1": Atom("s1")}
SYM_F = Atom("sF")
Q_ACC = "q_acc"


def gen_t(n: int) -> TypeExpr:
    """``T(n)``: row i is ``a -> Psi^(i-1) -> (a->b) -> (b->a)^(n-i) -> b``.

    ``Psi = (a->a) & (b->b)``.  Atoms are named ``a`` and ``b``.
    """
    if n < 1:
        raise ValueError("T(n) needs n >= 1")
    psi = inter([arrows(ALPHA, ALPHA), arrows(BETA, BETA)])
    rows = []
    for i in range(1, n + 1):
        args = [ALPHA] + [psi] * (i - 1) + [arrows(ALPHA, BETA)] + [arrows(BETA, ALPHA)] * (n - i)
        rows.append(arrows(*args, BETA))
    return inter(rows)


def _pos(i: int) -> Atom:
    return Atom(f"p{i}")


def _state(q: str) -> Atom:
    return Atom(q)


def _ident(p: int) -> TypeExpr:
    """``(s0 -> ... -> s0) & (s1 -> ... -> s1)`` with p + 1 atoms per side."""
    return inter([arrows(*[SYM["0"]] * (p + 1)), arrows(*[SYM["1"]] * (p + 1))])


def _shift(move: str) -> int:
    return 1 if move == "R" else -1


@dataclass(frozen=True)
class ColumnSpec:
    """One argument position across all ``n + 2`` rows.

    ``rows[:n]`` are tape cells, ``rows[n]`` the head row and ``rows[n+1]``
    the state row.  ``label`` says where the column came from.
    """

    rows: tuple[TypeExpr, ...]
    label: str


def _check(m: Machine, word: str) -> None:
    if not word:
        raise MachineError("empty word")
    if set(word) - {"0", "1"}:
        raise MachineError(f"word {word!r} is not over 0/1")
    if Q_ACC in m.states:
        raise MachineError(f"state name {Q_ACC} is reserved")
    reserved = {"s0", "s1", "sF"} | {f"p{i}" for i in range(len(word) + 1)}
    clash = reserved.intersection(m.states)
    if clash:
        raise MachineError(f"state names {sorted(clash)} clash with tape/head atoms")


def columns(m: Machine, word: str) -> list[ColumnSpec]:
    """All columns of the encoding, left to right, ending with the two base columns."""
    _check(m, word)
    n = len(word)
    cols: list[ColumnSpec] = []

    accepting = [q for q in m.states if m.kind[q] is Kind.ACCEPT]
    if accepting:
        s = inter([arrows(SYM_F, SYM["0"]), arrows(SYM_F, SYM["1"])])
        k = arrows(_pos(0), _pos(n))
        q = inter([arrows(_state(Q_ACC), _state(a)) for a in accepting])
        cols.append(ColumnSpec((s,) * n + (k, q), "accept"))

    for t in m.delta:
        if m.kind[t.src] is not Kind.OR:
            continue
        heads = range(2, n + 1) if t.move == "L" else range(1, n)
        for j in heads:
            tape = [_ident(1)] * n
            tape[j - 1] = arrows(SYM[t.write], SYM[t.read])
            head = arrows(_pos(j + _shift(t.move)), _pos(j))
            state = arrows(_state(t.dst), _state(t.src))
            cols.append(ColumnSpec((*tape, head, state), f"or {t} @{j}"))

    for q in m.states:
        if m.kind[q] is not Kind.AND:
            continue
        for s in "01":
            for i in range(1, n + 1):
                avail = [
                    t
                    for t in m.delta
                    if t.src == q
                    and t.read == s
                    and ((t.move == "L" and i > 1) or (t.move == "R" and i < n))
                ]
                p = len(avail)
                tape = [_ident(p)] * n
                tape[i - 1] = arrows(*[SYM[t.write] for t in avail], SYM[s])
                head = arrows(*[_pos(i + _shift(t.move)) for t in avail], _pos(i))
                state = arrows(*[_state(t.dst) for t in avail], _state(q))
                cols.append(ColumnSpec((*tape, head, state), f"and {q},{s} @{i}"))

    cols.append(ColumnSpec((SYM_F,) * n + (_pos(0), _state(Q_ACC)), "final"))
    cols.append(
        ColumnSpec(tuple(SYM[c] for c in word) + (_pos(1), _state(m.initial)), "initial")
    )
    return cols


def row_types(cols: Sequence[ColumnSpec]) -> list[TypeExpr]:
    """Assemble rows: every column is an argument, the last column is the tail."""
    height = len(cols[0].rows)
    return [arrows(*(c.rows[r] for c in cols)) for r in range(height)]


def reduce(m: Machine, word: str) -> TypeExpr:
    """The type that is inhabited iff ``m`` accepts ``word`` in place."""
    return inter(row_types(columns(m, word)))
