"""Decision procedure for inhabitation of rank-two intersection types.

The search works on *tasks*: several judgments ``G_i |- M : t_i`` that
constrain one unknown term ``M``.  A task whose targets are all arrows is
solved by an abstraction; a task with some atomic target is solved by a
head variable applied to the solutions of argument tasks.  This is an
AND-OR graph over task fingerprints (:func:`config_key`), which is finite
for goals of rank at most two.

:func:`solve` explores the reachable part of that graph once, then
computes the least fixpoint of "solvable, with minimal witness depth" in
the style of Knuth's generalisation of Dijkstra's algorithm.  Cycles can
never support a solution under a least fixpoint, so no path-dependent
failure caching is needed and the minimal witness is independent of the
exploration order.

:func:`enumerate_long` and :func:`exists_long` unfold long solutions
directly, without memoisation.  They are the brute-force oracle the solver
is tested against.
"""

from __future__ import annotations

import heapq
import sys
import time
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Optional, Union

from .terms import (
    App,
    Derivation,
    Env,
    Lam,
    Rule,
    Term,
    Var,
    apply,
    head_and_args,
)
from .types import Arrow, Atom, Inter, TypeExpr, inter, rank, size, spines

__all__ = [
    "Candidate",
    "Empty",
    "Inhabited",
    "InvariantViolation",
    "Judgment",
    "Limits",
    "RankTooHigh",
    "ResourceExceeded",
    "SolveResult",
    "SolveStats",
    "Task",
    "abstraction_step",
    "arg_tasks",
    "candidate_heads",
    "config_key",
    "enumerate_long",
    "exists_long",
    "initial_task",
    "rem",
    "solve",
    "synthesize_derivation",
]


class RankTooHigh(ValueError):
    """The goal has rank above two; termination is not guaranteed."""


class InvariantViolation(RuntimeError):
    """A structural bound that must hold during search was broken."""


class OracleBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Judgment:
    env: Env
    target: TypeExpr


@dataclass(frozen=True)
class Task:
    judgments: tuple[Judgment, ...]

    def __post_init__(self) -> None:
        if not self.judgments:
            raise ValueError("a task needs at least one judgment")

    @property
    def names(self) -> tuple[str, ...]:
        """Variables declared in every environment, in declaration order."""
        first = self.judgments[0].env.names
        return tuple(n for n in first if all(n in j.env for j in self.judgments[1:]))

    @property
    def targets(self) -> tuple[TypeExpr, ...]:
        return tuple(j.target for j in self.judgments)

    def column(self, name: str) -> tuple[TypeExpr, ...]:
        return tuple(j.env.lookup(name) for j in self.judgments)  # type: ignore[misc]

    def __len__(self) -> int:
        return len(self.judgments)

    def __iter__(self) -> Iterator[Judgment]:
        return iter(self.judgments)


@dataclass(frozen=True)
class Candidate:
    """Head choice for case 2: ``var`` applied to ``k`` arguments.

    ``args[i]`` holds the k argument types demanded by judgment ``i``.
    """

    var: str
    k: int
    args: tuple[tuple[TypeExpr, ...], ...]


def _dedup(judgments) -> tuple[Judgment, ...]:
    return tuple(dict.fromkeys(judgments))


def rem(env: Env, target: TypeExpr) -> list[Judgment]:
    """Split a judgment into one judgment per intersection component."""
    if isinstance(target, Inter):
        return [Judgment(env, p) for p in target.parts]
    return [Judgment(env, target)]


def initial_task(goal: TypeExpr) -> Task:
    r = rank(goal)
    if r > 2:
        raise RankTooHigh(f"goal has rank {r}; only rank <= 2 is decidable here")
    return Task(tuple(rem(Env(), goal)))


def abstraction_step(z: Task, fresh: str) -> Task:
    """Case 1: every target is ``a_i -> b_i``; bind ``fresh : a_i`` in each row."""
    out: list[Judgment] = []
    for j in z:
        if not isinstance(j.target, Arrow):
            raise ValueError(f"abstraction needs arrow targets, found {j.target}")
        if fresh in j.env:
            raise ValueError(f"{fresh} is not fresh")
        out.extend(rem(j.env.extend(fresh, j.target.left), j.target.right))
    return Task(_dedup(out))


def candidate_heads(z: Task) -> list[Candidate]:
    """Case 2 head choices, in declaration order, then arity, then component order.

    A variable qualifies with arity ``k`` when, in every judgment, some way
    of using its declared type as a head takes exactly ``k`` arguments and
    ends in exactly that judgment's target.  Every combination of matching
    components across judgments is a separate candidate.  An empty result
    means the task is unsolvable (case 3).
    """
    if not any(isinstance(t, Atom) for t in z.targets):
        raise ValueError("candidate_heads needs at least one atomic target")
    out: list[Candidate] = []
    for name in z.names:
        rows: list[dict[int, list[tuple[TypeExpr, ...]]]] = []
        for j in z:
            by_k: dict[int, list[tuple[TypeExpr, ...]]] = {}
            for args, tail in spines(j.env.lookup(name)):  # type: ignore[arg-type]
                if tail == j.target:
                    opts = by_k.setdefault(len(args), [])
                    if args not in opts:
                        opts.append(args)
            if not by_k:
                break
            rows.append(by_k)
        else:
            common = set(rows[0]).intersection(*rows[1:])
            for k in sorted(common):
                for combo in product(*(r[k] for r in rows)):
                    out.append(Candidate(name, k, combo))
    return out


def arg_tasks(z: Task, c: Candidate) -> list[Task]:
    """The k independent argument tasks ``Z_1 .. Z_k`` for a head choice."""
    tasks = []
    for a in range(c.k):
        js: list[Judgment] = []
        for j, row in zip(z, c.args):
            js.extend(rem(j.env, row[a]))
        tasks.append(Task(_dedup(js)))
    return tasks


ConfigKey = tuple


def config_key(z: Task) -> ConfigKey:
    """Fingerprint of a task, independent of variable names and duplicates.

    All judgments of a task share the same variable names, so a task is
    determined by its target vector and the set of per-variable type
    vectors (one type per judgment).
    """
    return (z.targets, frozenset(z.column(n) for n in z.names))


def _fresh(z: Task) -> str:
    used = set(z.names)
    i = len(used) + 1
    while f"x{i}" in used:
        i += 1
    return f"x{i}"


# -- solve --------------------------------------------------------------------


@dataclass
class Limits:
    max_configs: Optional[int] = 2_000_000
    max_time: Optional[float] = None


@dataclass
class SolveStats:
    configs: int = 0
    elapsed: float = 0.0
    max_width: int = 0
    max_env_rank: int = 0
    witness_depth: Optional[int] = None


@dataclass(frozen=True)
class Inhabited:
    term: Term
    derivation: Derivation
    stats: SolveStats = field(compare=False)


@dataclass(frozen=True)
class Empty:
    stats: SolveStats = field(compare=False)


@dataclass(frozen=True)
class ResourceExceeded:
    reason: str
    stats: SolveStats = field(compare=False)


SolveResult = Union[Inhabited, Empty, ResourceExceeded]

_LAM, _APP = 0, 1


@dataclass
class _Alt:
    kind: int
    children: tuple[ConfigKey, ...]
    column: tuple[TypeExpr, ...] = ()
    cand: Optional[Candidate] = None


@dataclass
class _Node:
    task: Task
    alts: list[_Alt] = field(default_factory=list)


class _Budget(Exception):
    def __init__(self, reason: str):
        self.reason = reason


class _Search:
    def __init__(self, goal: TypeExpr, limits: Limits):
        self.goal = goal
        self.width_bound = size(goal)
        self.limits = limits
        self.nodes: dict[ConfigKey, _Node] = {}
        self.stats = SolveStats()
        self.start = time.perf_counter()

    def register(self, z: Task) -> tuple[ConfigKey, bool]:
        key = config_key(z)
        if key in self.nodes:
            return key, False
        if len(z) > self.width_bound:
            raise InvariantViolation(
                f"task width {len(z)} exceeds size of goal {self.width_bound}"
            )
        for j in z:
            for _, t in j.env.decls:
                r = rank(t)
                if r > 1:
                    raise InvariantViolation(f"environment type {t} has rank {r}")
                self.stats.max_env_rank = max(self.stats.max_env_rank, r)
        self.stats.max_width = max(self.stats.max_width, len(z))
        lim = self.limits
        if lim.max_configs is not None and len(self.nodes) >= lim.max_configs:
            raise _Budget(f"more than {lim.max_configs} configurations")
        if lim.max_time is not None and len(self.nodes) % 64 == 0:
            if time.perf_counter() - self.start > lim.max_time:
                raise _Budget(f"more than {lim.max_time} s")
        self.nodes[key] = _Node(z)
        return key, True

    def explore(self, root: Task) -> ConfigKey:
        root_key, _ = self.register(root)
        todo = [root_key]
        while todo:
            node = self.nodes[todo.pop()]
            z = node.task
            if all(isinstance(t, Arrow) for t in z.targets):
                child = abstraction_step(z, _fresh(z))
                key, new = self.register(child)
                node.alts.append(_Alt(_LAM, (key,)))
                if new:
                    todo.append(key)
                continue
            seen_columns: dict[tuple, str] = {}
            for c in candidate_heads(z):
                col = z.column(c.var)
                if seen_columns.setdefault(col, c.var) != c.var:
                    continue  # same type vector as an earlier variable
                keys = []
                for sub in arg_tasks(z, c):
                    key, new = self.register(sub)
                    keys.append(key)
                    if new:
                        todo.append(key)
                node.alts.append(_Alt(_APP, tuple(keys), col, c))
        return root_key

    def fixpoint(self) -> dict[ConfigKey, int]:
        """Minimal witness depth of every solvable node."""
        parents: dict[ConfigKey, list[tuple[ConfigKey, int]]] = {}
        pending: dict[tuple[ConfigKey, int], int] = {}
        best_child: dict[tuple[ConfigKey, int], int] = {}
        heap: list[tuple[int, int, ConfigKey, int]] = []
        order = {k: i for i, k in enumerate(self.nodes)}
        for key, node in self.nodes.items():
            for ai, alt in enumerate(node.alts):
                kids = set(alt.children)
                pending[(key, ai)] = len(kids)
                best_child[(key, ai)] = 0
                for kid in kids:
                    parents.setdefault(kid, []).append((key, ai))
                if not kids:
                    heapq.heappush(heap, (1, order[key], key, ai))
        depth: dict[ConfigKey, int] = {}
        while heap:
            d, _, key, _ = heapq.heappop(heap)
            if key in depth:
                continue
            depth[key] = d
            for parent, ai in parents.get(key, ()):
                if parent in depth:
                    continue
                slot = (parent, ai)
                pending[slot] -= 1
                best_child[slot] = max(best_child[slot], d)
                if pending[slot] == 0:
                    w = 0 if self.nodes[parent].alts[ai].kind == _LAM else 1
                    heapq.heappush(heap, (best_child[slot] + w, order[parent], parent, ai))
        return depth

    def choose(self, key: ConfigKey, depth: dict[ConfigKey, int]) -> _Alt:
        target = depth[key]
        for alt in self.nodes[key].alts:
            if all(k in depth for k in alt.children):
                w = 0 if alt.kind == _LAM else 1
                if w + max((depth[k] for k in alt.children), default=0) == target:
                    return alt
        raise AssertionError("no alternative realises the fixpoint depth")

    def build(self, z: Task, key: ConfigKey, depth: dict[ConfigKey, int]) -> Term:
        alt = self.choose(key, depth)
        if alt.kind == _LAM:
            x = _fresh(z)
            return Lam(x, self.build(abstraction_step(z, x), alt.children[0], depth))
        head = next(n for n in z.names if z.column(n) == alt.column)
        c = Candidate(head, alt.cand.k, alt.cand.args)  # type: ignore[union-attr]
        args = []
        for sub, kid in zip(arg_tasks(z, c), alt.children):
            assert config_key(sub) == kid
            args.append(self.build(sub, kid, depth))
        return apply(Var(head), *args)


def solve(goal: TypeExpr, limits: Optional[Limits] = None) -> SolveResult:
    """Decide inhabitation of ``goal`` and synthesise a minimal long witness.

    Raises :class:`RankTooHigh` for goals of rank above two.  The witness
    has minimal :func:`~rank2inhab.terms.term_depth`; ties go to the head
    variable declared first, then to the first component choice.
    """
    limits = limits or Limits()
    z0 = initial_task(goal)
    search = _Search(goal, limits)
    try:
        root = search.explore(z0)
    except _Budget as exc:
        search.stats.configs = len(search.nodes)
        search.stats.elapsed = time.perf_counter() - search.start
        return ResourceExceeded(exc.reason, search.stats)
    depth = search.fixpoint()
    stats = search.stats
    stats.configs = len(search.nodes)
    if root not in depth:
        stats.elapsed = time.perf_counter() - search.start
        return Empty(stats)
    if sys.getrecursionlimit() < 20000:
        sys.setrecursionlimit(20000)
    term = search.build(z0, root, depth)
    derivation = synthesize_derivation(term, goal)
    if derivation is None:
        raise AssertionError(f"solver produced an untypable witness {term}")
    stats.witness_depth = depth[root]
    stats.elapsed = time.perf_counter() - search.start
    return Inhabited(term, derivation, stats)


# -- derivations for long terms ---------------------------------------------


def synthesize_derivation(
    term: Term, goal: TypeExpr, env: Optional[Env] = None
) -> Optional[Derivation]:
    """Build an explicit derivation of ``env |- term : goal`` for a long term.

    Intersection goals are split with I_INTER, abstractions introduced with
    I_ARROW, and a head variable is followed through its declared type by
    E_INTER (choosing components) and E_ARROW (consuming arguments).
    Returns None if no such derivation exists.
    """
    return _Deriver().derive(env or Env(), term, goal)


class _Deriver:
    # failed component choices are revisited otherwise, which is exponential
    # in the length of a head spine
    def __init__(self) -> None:
        self.memo: dict[tuple, Optional[Derivation]] = {}

    def derive(self, env: Env, m: Term, t: TypeExpr) -> Optional[Derivation]:
        key = (id(m), env.decls, t)
        if key not in self.memo:
            self.memo[key] = self._derive(env, m, t)
        return self.memo[key]

    def _derive(self, env: Env, m: Term, t: TypeExpr) -> Optional[Derivation]:
        if isinstance(t, Inter):
            ds = []
            for p in t.parts:
                d = self.derive(env, m, p)
                if d is None:
                    return None
                ds.append(d)
            acc = ds[-1]
            for d in reversed(ds[:-1]):
                acc = Derivation(Rule.I_INTER, env, m, inter([d.type, acc.type]), (d, acc))
            return acc
        if isinstance(m, Lam):
            if not isinstance(t, Arrow) or m.binder in env:
                return None
            body = self.derive(env.extend(m.binder, t.left), m.body, t.right)
            if body is None:
                return None
            return Derivation(Rule.I_ARROW, env, m, t, (body,))
        head, args = head_and_args(m)
        if not isinstance(head, Var):
            return None
        declared = env.lookup(head.name)
        if declared is None:
            return None
        start = Derivation(Rule.VAR, env, head, declared)
        return next(self._follow(env, start, args, 0, t), None)

    def _follow(
        self, env: Env, d: Derivation, args: list[Term], i: int, goal: TypeExpr
    ) -> Iterator[Derivation]:
        ty = d.type
        if isinstance(ty, Inter):
            for n, part in enumerate(ty.parts):
                tag = Rule.E_INTER_L if n == 0 else Rule.E_INTER_R
                nxt = Derivation(tag, env, d.term, part, (d,))
                yield from self._follow(env, nxt, args, i, goal)
            return
        if i == len(args):
            if ty == goal:
                yield d
            return
        if isinstance(ty, Arrow):
            arg_d = self.derive(env, args[i], ty.left)
            if arg_d is not None:
                app = Derivation(Rule.E_ARROW, env, App(d.term, args[i]), ty.right, (d, arg_d))
                yield from self._follow(env, app, args, i + 1, goal)


# -- brute-force oracle --------------------------------------------------------


class _Steps:
    def __init__(self, limit: Optional[int]):
        self.limit = limit
        self.used = 0

    def tick(self) -> None:
        self.used += 1
        if self.limit is not None and self.used > self.limit:
            raise OracleBudgetExceeded(f"oracle exceeded {self.limit} steps")


def enumerate_long(
    goal: TypeExpr, depth_bound: int, max_steps: Optional[int] = None
) -> list[Term]:
    """All long solutions of ``goal`` with :func:`term_depth` at most ``depth_bound``.

    Plain recursive unfolding, no memoisation and no pruning.  Raises
    :class:`OracleBudgetExceeded` after ``max_steps`` recursive calls.
    """
    steps = _Steps(max_steps)
    return list(dict.fromkeys(_enum(initial_task(goal), depth_bound, steps)))


def _enum(z: Task, depth: int, steps: _Steps) -> list[Term]:
    steps.tick()
    if all(isinstance(t, Arrow) for t in z.targets):
        x = _fresh(z)
        return [Lam(x, body) for body in _enum(abstraction_step(z, x), depth, steps)]
    if depth < 1:
        return []
    out: list[Term] = []
    for c in candidate_heads(z):
        subs = []
        for sub in arg_tasks(z, c):
            sols = _enum(sub, depth - 1, steps)
            if not sols:
                break
            subs.append(sols)
        else:
            for combo in product(*subs):
                out.append(apply(Var(c.var), *combo))
    return list(dict.fromkeys(out))


def exists_long(goal: TypeExpr, depth_bound: int, max_steps: Optional[int] = None) -> bool:
    """Whether :func:`enumerate_long` would return anything, short-circuiting."""
    return _exists(initial_task(goal), depth_bound, _Steps(max_steps))


def _exists(z: Task, depth: int, steps: _Steps) -> bool:
    steps.tick()
    if all(isinstance(t, Arrow) for t in z.targets):
        return _exists(abstraction_step(z, _fresh(z)), depth, steps)
    if depth < 1:
        return False
    return any(
        all(_exists(sub, depth - 1, steps) for sub in arg_tasks(z, c))
        for c in candidate_heads(z)
    )
