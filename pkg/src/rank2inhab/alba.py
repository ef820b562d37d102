"""Alternating linear bounded automata over the tape alphabet {0, 1}.

Acceptance of a configuration is the least fixpoint of the three clauses
(accept-kind with the head on the last cell, or-kind with some accepting
successor, and-kind with all successors accepting).  The configuration space
of a word of length n is finite, so the fixpoint is computed by plain
iteration over the configurations reachable from the start.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Union

__all__ = [
    "Config",
    "Kind",
    "Machine",
    "MachineError",
    "Transition",
    "accepting_configs",
    "accepts",
    "accepts_in_place",
    "apply_transition",
    "consistent_transitions",
    "load_machine",
    "reachable_configs",
]

_NAME_RE = re.compile(r"[A-Za-z0-9_]+\Z")


class MachineError(ValueError):
    pass


class Kind(Enum):
    AND = "and"
    OR = "or"
    ACCEPT = "accept"


@dataclass(frozen=True)
class Transition:
    """``((src, read), (dst, write, move))`` with ``move`` in {"L", "R"}."""

    src: str
    read: str
    dst: str
    write: str
    move: str

    def __str__(self) -> str:
        return f"(({self.src},{self.read}),({self.dst},{self.write},{self.move}))"


@dataclass(frozen=True)
class Machine:
    states: tuple[str, ...]
    initial: str
    kind: dict
    delta: tuple[Transition, ...]

    def __post_init__(self) -> None:
        if not self.states:
            raise MachineError("machine has no states")
        if len(set(self.states)) != len(self.states):
            raise MachineError("duplicate state names")
        for q in self.states:
            if not _NAME_RE.match(q):
                raise MachineError(f"state name {q!r} is not an identifier")
        if self.initial not in self.states:
            raise MachineError(f"initial state {self.initial!r} is not a state")
        if set(self.kind) != set(self.states):
            raise MachineError("kind must be given for exactly the machine's states")
        if not self.delta:
            raise MachineError("transition relation is empty")
        for p in self.delta:
            if p.src not in self.states or p.dst not in self.states:
                raise MachineError(f"transition {p} mentions an unknown state")
            if p.read not in "01" or p.write not in "01" or len(p.read) != 1 or len(p.write) != 1:
                raise MachineError(f"transition {p} uses a symbol outside {{0,1}}")
            if p.move not in ("L", "R"):
                raise MachineError(f"transition {p} has direction {p.move!r}")
        if len(set(self.delta)) != len(self.delta):
            raise MachineError("transition relation lists an element twice")

    def __hash__(self) -> int:
        return hash((self.states, self.initial, self.delta))

    @classmethod
    def build(
        cls,
        kind: dict[str, Union[Kind, str]],
        delta: Iterable,
        initial: str = "q0",
    ) -> "Machine":
        """Convenience constructor; states are taken in the order of ``kind``."""
        k = {q: Kind(v) if not isinstance(v, Kind) else v for q, v in kind.items()}
        ts = tuple(dict.fromkeys(t if isinstance(t, Transition) else Transition(*t) for t in delta))
        return cls(tuple(k), initial, k, ts)

    def to_json(self) -> dict:
        return {
            "states": list(self.states),
            "initial": self.initial,
            "kind": {q: self.kind[q].value for q in self.states},
            "delta": [[p.src, p.read, p.dst, p.write, p.move] for p in self.delta],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Machine":
        try:
            states = tuple(data["states"])
            initial = data["initial"]
            raw_kind = data["kind"]
            rows = data["delta"]
        except (KeyError, TypeError) as exc:
            raise MachineError(f"missing field {exc}") from exc
        try:
            kind = {q: Kind(str(v).lower()) for q, v in raw_kind.items()}
        except ValueError as exc:
            raise MachineError(str(exc)) from exc
        delta = []
        for row in rows:
            if not isinstance(row, list) or len(row) != 5:
                raise MachineError(f"delta row {row!r} must have 5 entries")
            delta.append(Transition(*(str(x) for x in row)))
        return cls(states, initial, kind, tuple(delta))


def load_machine(path: Union[str, Path]) -> Machine:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MachineError(f"{path}: {exc}") from exc
    return Machine.from_json(data)


@dataclass(frozen=True)
class Config:
    state: str
    tape: str
    head: int  # 1-based

    def __post_init__(self) -> None:
        if not self.tape or set(self.tape) - {"0", "1"}:
            raise MachineError(f"tape {self.tape!r} is not a nonempty word over 0/1")
        if not 1 <= self.head <= len(self.tape):
            raise MachineError(f"head {self.head} outside the tape")


def consistent_transitions(m: Machine, c: Config) -> list[Transition]:
    symbol = c.tape[c.head - 1]
    n = len(c.tape)
    return [
        p
        for p in m.delta
        if p.src == c.state
        and p.read == symbol
        and ((p.move == "L" and c.head > 1) or (p.move == "R" and c.head < n))
    ]


def apply_transition(c: Config, p: Transition) -> Config:
    if p.src != c.state or p.read != c.tape[c.head - 1]:
        raise MachineError(f"{p} does not apply in state {c.state} reading {c.tape[c.head - 1]}")
    head = c.head + (1 if p.move == "R" else -1)
    if not 1 <= head <= len(c.tape):
        raise MachineError(f"{p} moves the head off the word")
    i = c.head - 1
    return Config(p.dst, c.tape[:i] + p.write + c.tape[i + 1 :], head)


def reachable_configs(m: Machine, start: Config) -> dict[Config, list[Config]]:
    """Successor map of every configuration reachable from ``start``."""
    succ: dict[Config, list[Config]] = {}
    todo = [start]
    while todo:
        c = todo.pop()
        if c in succ:
            continue
        succ[c] = [apply_transition(c, p) for p in consistent_transitions(m, c)]
        todo.extend(s for s in succ[c] if s not in succ)
    return succ


def accepting_configs(m: Machine, start: Config) -> set[Config]:
    """Least fixpoint: reachable configurations in which the machine accepts."""
    succ = reachable_configs(m, start)
    marked: set[Config] = set()
    changed = True
    while changed:
        changed = False
        for c, nxt in succ.items():
            if c in marked:
                continue
            k = m.kind[c.state]
            if k is Kind.ACCEPT:
                ok = c.head == len(c.tape)
            elif k is Kind.OR:
                ok = any(s in marked for s in nxt)
            else:
                ok = all(s in marked for s in nxt)
            if ok:
                marked.add(c)
                changed = True
    return marked


def accepts(m: Machine, c: Config) -> bool:
    return c in accepting_configs(m, c)


def accepts_in_place(m: Machine, word: str) -> bool:
    """Does ``m`` accept ``word`` from state q0 with the head on the first cell?"""
    if not word:
        raise MachineError("empty word")
    return accepts(m, Config(m.initial, word, 1))
