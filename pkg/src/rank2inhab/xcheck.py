"""Cross-validation of the solver against the automaton.

For a machine and a word, the encoding produced by
:func:`rank2inhab.reduction.reduce` must be inhabited exactly when the
machine accepts the word in place.  Both sides are computed independently
and compared.
"""

from __future__ import annotations

import itertools
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .alba import Machine, Transition, accepts_in_place
from .reduction import reduce
from .solver import Empty, Inhabited, Limits, ResourceExceeded, solve
from .terms import check_derivation, show_term
from .types import size

__all__ = [
    "XCheckReport",
    "exhaustive_machines",
    "random_machines",
    "run_batch",
    "words",
    "xcheck",
]

# fixed transition pools for the exhaustive sweep, one per state count
POOLS = {
    1: (
        Transition("q0", "0", "q0", "1", "R"),
        Transition("q0", "1", "q0", "0", "L"),
        Transition("q0", "0", "q0", "0", "L"),
        Transition("q0", "1", "q0", "1", "R"),
    ),
    2: (
        Transition("q0", "0", "q1", "1", "R"),
        Transition("q0", "1", "q0", "0", "R"),
        Transition("q1", "0", "q0", "0", "L"),
        Transition("q1", "1", "q1", "1", "L"),
    ),
}

KINDS = ("and", "or", "accept")

TSV_HEADER = "machine\tword\tsolver\tautomaton\tagree\tsolve_s\talba_s\tconfigs\tderivation_ok\twitness"


@dataclass
class XCheckReport:
    machine_id: str
    word: str
    solver: str  # "accept", "reject" or "budget"
    automaton: str  # "accept" or "reject"
    agree: Optional[bool]  # None when the solver hit its budget
    witness: Optional[str]
    solve_seconds: float
    alba_seconds: float
    configs: int
    derivation_ok: Optional[bool]
    goal_size: int = 0
    max_width: int = 0
    max_env_rank: int = 0

    def tsv(self) -> str:
        fields = [
            self.machine_id,
            self.word,
            self.solver,
            self.automaton,
            "-" if self.agree is None else str(self.agree).lower(),
            f"{self.solve_seconds:.4f}",
            f"{self.alba_seconds:.4f}",
            str(self.configs),
            "-" if self.derivation_ok is None else str(self.derivation_ok).lower(),
            self.witness or "-",
        ]
        return "\t".join(fields)

    def as_dict(self) -> dict:
        return asdict(self)


def xcheck(
    m: Machine, word: str, limits: Optional[Limits] = None, machine_id: str = "machine"
) -> XCheckReport:
    goal = reduce(m, word)
    t0 = time.perf_counter()
    result = solve(goal, limits)
    t1 = time.perf_counter()
    accepted = accepts_in_place(m, word)
    t2 = time.perf_counter()

    witness = None
    derivation_ok = None
    if isinstance(result, Inhabited):
        verdict = "accept"
        witness = show_term(result.term)
        derivation_ok = not check_derivation(result.derivation)
    elif isinstance(result, Empty):
        verdict = "reject"
    else:
        assert isinstance(result, ResourceExceeded)
        verdict = "budget"
    automaton = "accept" if accepted else "reject"
    return XCheckReport(
        machine_id=machine_id,
        word=word,
        solver=verdict,
        automaton=automaton,
        agree=None if verdict == "budget" else verdict == automaton,
        witness=witness,
        solve_seconds=t1 - t0,
        alba_seconds=t2 - t1,
        configs=result.stats.configs,
        derivation_ok=derivation_ok,
        goal_size=size(goal),
        max_width=result.stats.max_width,
        max_env_rank=result.stats.max_env_rank,
    )


def words(lengths: Iterable[int]) -> list[str]:
    return ["".join(w) for n in lengths for w in itertools.product("01", repeat=n)]


def exhaustive_machines() -> Iterator[tuple[str, Machine]]:
    """Every nonempty subset of the pool for |Q| in {1, 2}, under every kind map."""
    for nq, pool in POOLS.items():
        states = [f"q{i}" for i in range(nq)]
        for r in range(1, len(pool) + 1):
            for subset in itertools.combinations(range(len(pool)), r):
                for kinds in itertools.product(KINDS, repeat=nq):
                    m = Machine.build(dict(zip(states, kinds)), [pool[i] for i in subset])
                    ident = f"ex{nq}-{''.join(map(str, subset))}-{''.join(k[:2] for k in kinds)}"
                    yield ident, m


def random_machine(rng: random.Random, max_states: int = 3, max_delta: int = 6) -> Machine:
    nq = rng.randint(1, max_states)
    states = [f"q{i}" for i in range(nq)]
    kinds = {q: rng.choice(KINDS) for q in states}
    delta = []
    for _ in range(rng.randint(1, max_delta)):
        delta.append(
            Transition(
                rng.choice(states),
                rng.choice("01"),
                rng.choice(states),
                rng.choice("01"),
                rng.choice("LR"),
            )
        )
    return Machine.build(kinds, delta)


def random_machines(
    seed: int, count: int, max_states: int = 3, max_delta: int = 6
) -> Iterator[tuple[str, Machine]]:
    rng = random.Random(seed)
    for i in range(count):
        yield f"rnd{seed}-{i}", random_machine(rng, max_states, max_delta)


def _run_case(args: tuple) -> XCheckReport:
    ident, m, w, limits = args
    return xcheck(m, w, limits, ident)


def run_batch(
    machines: Iterable[tuple[str, Machine]],
    word_list: Sequence[str],
    limits: Optional[Limits] = None,
    jobs: int = 1,
) -> Iterator[XCheckReport]:
    """Cross-check every machine on every word; yields reports in input order."""
    cases = ((ident, m, w, limits) for ident, m in machines for w in word_list)
    if jobs <= 1:
        yield from map(_run_case, cases)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        yield from pool.map(_run_case, cases, chunksize=16)
