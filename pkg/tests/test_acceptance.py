"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline;
they are also repeated in the terminal summary.  Criteria 5 and 8 audit
every solve performed by the other criteria in this module (and run a
small suite of their own when selected in isolation).
"""

import itertools
import random
import time

import pytest

from rank2inhab.reduction import gen_t
from rank2inhab.solver import (
    Empty,
    Inhabited,
    InvariantViolation,
    OracleBudgetExceeded,
    ResourceExceeded,
    enumerate_long,
    exists_long,
    solve,
)
from rank2inhab.terms import alpha_equal, check_derivation, parse_term, term_size
from rank2inhab.types import parse_type, size
from rank2inhab.xcheck import exhaustive_machines, random_machines, run_batch, words

from randtypes import aci_shuffle, random_type, rename_atoms, show_raw

SEED = 20261018

T3_WITNESS = parse_term(r"\x1 x2 x3 x4. x2(x3(x2(x4(x2(x3(x2 x1))))))")
T4_WITNESS = parse_term(
    r"\x1 x2 x3 x4 x5. x2(x3(x2(x4(x2(x3(x2(x5(x2(x3(x2(x4(x2(x3(x2 x1))))))))))))))"
)

EMPTY_TYPES = ["a", "(a->a)->a", "((a->b)->a)->a", "a & (a->a)"]

# every solve in this module: (label, goal size, result or the invariant error)
SOLVES: list = []
# derivation verdicts coming from xcheck reports, which solve in their own calls
XCHECK_AUDIT: list = []


def audited_solve(goal, label):
    try:
        result = solve(goal)
    except InvariantViolation as exc:
        SOLVES.append((label, size(goal), exc))
        raise
    SOLVES.append((label, size(goal), result))
    return result


def test_criterion_1_known_witnesses(verdict):
    details, ok = [], True
    for n, expected in [(3, T3_WITNESS), (4, T4_WITNESS)]:
        t0 = time.perf_counter()
        r = audited_solve(gen_t(n), f"T({n})")
        elapsed = time.perf_counter() - t0
        good = isinstance(r, Inhabited) and alpha_equal(r.term, expected) and elapsed < 1.0
        ok &= good
        details.append(f"T({n}) alpha-equal={isinstance(r, Inhabited) and alpha_equal(r.term, expected)} {elapsed:.3f}s")
    verdict(1, ok, "; ".join(details))


def test_criterion_2_exponential_growth(verdict):
    apps, details, ok = {}, [], True
    for n in range(3, 8):
        t0 = time.perf_counter()
        r = audited_solve(gen_t(n), f"T({n})")
        elapsed = time.perf_counter() - t0
        if not isinstance(r, Inhabited):
            verdict(2, False, f"T({n}) not inhabited: {r}")
        apps[n] = term_size(r.term).applications
        ok &= apps[n] == 2**n - 1
        if n <= 5:
            sols = enumerate_long(gen_t(n), 2**n)
            agree = len(sols) == 1 and alpha_equal(sols[0], r.term)
            ok &= agree
            details.append(f"n={n} apps={apps[n]} oracle={'agrees' if agree else 'DIFFERS'}")
        else:
            ratio = apps[n] / apps[n - 1]
            ok &= abs(ratio - 2) < 0.1
            details.append(f"n={n} apps={apps[n]} ratio={ratio:.3f}")
        if n == 7:
            ok &= elapsed < 60
            details.append(f"T(7) {elapsed:.2f}s")
    verdict(2, ok, "; ".join(details))


def test_criterion_3_uniqueness(verdict):
    details, ok = [], True
    for n in (3, 4):
        depth = 2**n + 4
        sols = enumerate_long(gen_t(n), depth)
        ok &= len(sols) == 1
        details.append(f"T({n}) depth {depth}: {len(sols)} term(s)")
    verdict(3, ok, "; ".join(details))


def test_criterion_4_reduction_equivalence(verdict):
    machines = itertools.chain(exhaustive_machines(), random_machines(SEED, 500, max_states=3))
    total = agree = slow = 0
    worst = 0.0
    failures = []
    for r in run_batch(machines, words([2, 3])):
        total += 1
        seconds = r.solve_seconds + r.alba_seconds
        worst = max(worst, seconds)
        slow += seconds >= 10
        if r.agree:
            agree += 1
        elif len(failures) < 5:
            failures.append(f"{r.machine_id}/{r.word}: solver={r.solver} alba={r.automaton}")
        XCHECK_AUDIT.append(r)
    rate = agree / total
    detail = f"{agree}/{total} agree ({rate:.2%}), worst case {worst:.2f}s, seed={SEED}"
    if failures:
        detail += "; " + "; ".join(failures)
    verdict(4, total > 0 and agree == total and slow == 0, detail)


def test_criterion_6_emptiness(verdict):
    details, ok = [], True
    for text in EMPTY_TYPES:
        goal = parse_type(text)
        r = audited_solve(goal, text)
        found = len(enumerate_long(goal, 8))
        good = isinstance(r, Empty) and found == 0
        ok &= good
        details.append(f"{text}: {type(r).__name__}, oracle {found}")
    verdict(6, ok, "; ".join(details))


def _verdict_of(result):
    if isinstance(result, ResourceExceeded):
        return None
    return isinstance(result, Inhabited)


def test_criterion_7_invariance(verdict):
    rng = random.Random(SEED)
    atoms = ["a", "b", "c"]
    mismatches, skips, budget = [], 0, 0
    for i in range(1000):
        goal = random_type(rng)
        first = audited_solve(goal, f"rand{i}")
        base = _verdict_of(first)
        shuffled = parse_type(show_raw(aci_shuffle(goal, rng)))
        perm = rng.sample(["u", "v", "w"], 3)
        renamed = rename_atoms(goal, dict(zip(atoms, perm)))
        variants = [
            _verdict_of(audited_solve(shuffled, f"rand{i}/aci")),
            _verdict_of(audited_solve(renamed, f"rand{i}/rename")),
        ]
        if base is None or None in variants:
            budget += 1
            continue
        if any(v != base for v in variants):
            mismatches.append(f"#{i} {goal}: invariance broken")
            continue
        try:
            oracle = exists_long(goal, 6, max_steps=200_000)
        except OracleBudgetExceeded:
            skips += 1
            continue
        # the oracle is depth bounded: it may only miss deep witnesses
        if oracle and not base:
            mismatches.append(f"#{i} {goal}: oracle inhabited, solver empty")
        elif base and not oracle:
            if first.stats.witness_depth <= 6:
                mismatches.append(f"#{i} {goal}: solver witness at depth {first.stats.witness_depth} missed by oracle")
    detail = f"1000 types, {len(mismatches)} mismatches, {skips} oracle skips, {budget} budget stops, seed={SEED}"
    if mismatches:
        detail += "; " + "; ".join(mismatches[:5])
    verdict(7, not mismatches and budget == 0, detail)


def _own_suite():
    for n in (3, 4, 5):
        audited_solve(gen_t(n), f"T({n})")
    for text in EMPTY_TYPES:
        audited_solve(parse_type(text), text)
    rng = random.Random(SEED)
    for i in range(100):
        audited_solve(random_type(rng), f"rand{i}")


def test_criterion_5_soundness(verdict):
    if not SOLVES:
        _own_suite()
    inhabited = [(label, r) for label, _, r in SOLVES if isinstance(r, Inhabited)]
    bad = [label for label, r in inhabited if check_derivation(r.derivation)]
    xc = [r for r in XCHECK_AUDIT if r.solver == "accept"]
    bad += [f"{r.machine_id}/{r.word}" for r in xc if r.derivation_ok is not True]
    total = len(inhabited) + len(xc)
    verdict(5, total > 0 and not bad, f"{total} derivations checked, {len(bad)} failures {bad[:5]}")


def test_criterion_8_structural_bounds(verdict):
    if not SOLVES:
        _own_suite()
    bad = []
    for label, goal_size, r in SOLVES:
        if isinstance(r, InvariantViolation):
            bad.append(f"{label}: {r}")
        elif r.stats.max_width > goal_size or r.stats.max_env_rank > 1:
            bad.append(f"{label}: width {r.stats.max_width}/{goal_size} env rank {r.stats.max_env_rank}")
    for r in XCHECK_AUDIT:
        if r.max_width > r.goal_size or r.max_env_rank > 1:
            bad.append(f"{r.machine_id}/{r.word}: width {r.max_width}/{r.goal_size}")
    total = len(SOLVES) + len(XCHECK_AUDIT)
    verdict(8, total > 0 and not bad, f"{total} solves audited, {len(bad)} violations {bad[:5]}")
