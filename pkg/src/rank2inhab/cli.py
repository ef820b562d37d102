"""Command-line front end.

Exit codes: 0 inhabited / accept / agreement, 1 empty / reject,
2 usage or parse error, 3 budget exhausted, 4 solver and automaton disagree.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .alba import MachineError, accepts_in_place, load_machine
from .reduction import gen_t, reduce
from .solver import (
    Empty,
    Inhabited,
    Limits,
    OracleBudgetExceeded,
    RankTooHigh,
    enumerate_long,
    solve,
)
from .terms import (
    DerivationFormatError,
    TermSyntaxError,
    check_derivation,
    dump_derivation,
    load_derivation,
    show_term,
)
from .types import TypeSyntaxError, parse_type, rank, show
from .xcheck import TSV_HEADER, exhaustive_machines, random_machines, run_batch, words, xcheck

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_BUDGET, EXIT_DISAGREE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _read_type(text: Optional[str]):
    if text is None or text == "-":
        text = sys.stdin.read()
    return parse_type(text)


def _limits(args) -> Limits:
    return Limits(max_configs=args.max_configs, max_time=args.max_time)


def _word(w: str) -> str:
    if not w or set(w) - {"0", "1"}:
        raise UsageError(f"word must be a nonempty string over 0/1, got {w!r}")
    return w


def cmd_rank(args) -> int:
    print(rank(_read_type(args.type)))
    return EXIT_OK


def cmd_inhabit(args) -> int:
    goal = _read_type(args.type)
    result = solve(goal, _limits(args))
    if isinstance(result, Inhabited):
        print(f"inhabited: {show_term(result.term)}")
        if args.emit_derivation:
            Path(args.emit_derivation).write_text(dump_derivation(result.derivation))
        code = EXIT_OK
    elif isinstance(result, Empty):
        print("empty type")
        code = EXIT_NO
    else:
        print(f"resource limit exceeded: {result.reason}")
        code = EXIT_BUDGET
    if args.stats:
        s = result.stats
        print(f"configs={s.configs} elapsed={s.elapsed:.4f}s witness_depth={s.witness_depth}")
    return code


def cmd_check(args) -> int:
    path = Path(args.derivation)
    if not path.is_file():
        raise UsageError(f"no such file: {path}")
    d = load_derivation(path.read_text())
    violations = check_derivation(d)
    if not violations:
        print("ok")
        return EXIT_OK
    for v in violations:
        print(v)
    return EXIT_NO


def cmd_gen_t(args) -> int:
    if args.n < 1:
        raise UsageError("n must be at least 1")
    print(show(gen_t(args.n)))
    return EXIT_OK


def cmd_reduce(args) -> int:
    m = load_machine(args.machine)
    print(show(reduce(m, _word(args.word))))
    return EXIT_OK


def cmd_alba(args) -> int:
    m = load_machine(args.machine)
    ok = accepts_in_place(m, _word(args.word))
    print("accept" if ok else "reject")
    return EXIT_OK if ok else EXIT_NO


def cmd_xcheck(args) -> int:
    limits = _limits(args)
    if args.sweep:
        lengths = [int(x) for x in args.lengths.split(",")]
        if args.sweep == "exhaustive":
            machines = exhaustive_machines()
        else:
            print(f"seed={args.seed}")
            machines = random_machines(args.seed, args.count, args.max_states)
        reports = run_batch(machines, words(lengths), limits, args.jobs)
    else:
        if args.machine is None or args.word is None:
            raise UsageError("xcheck needs MACHINE WORD or --sweep")
        m = load_machine(args.machine)
        reports = iter([xcheck(m, _word(args.word), limits, Path(args.machine).stem)])

    out = open(args.report, "w") if args.report else None
    try:
        print(TSV_HEADER)
        if out:
            out.write(TSV_HEADER + "\n")
        total = agree = budget = 0
        for r in reports:
            total += 1
            line = r.tsv()
            print(line)
            if out:
                out.write(line + "\n")
            if r.agree is None:
                budget += 1
            elif r.agree and r.derivation_ok is not False:
                agree += 1
    finally:
        if out:
            out.close()
    disagree = total - agree - budget
    print(f"# cases={total} agree={agree} disagree={disagree} budget={budget}")
    if disagree:
        return EXIT_DISAGREE
    if budget:
        return EXIT_BUDGET
    return EXIT_OK


def cmd_enumerate(args) -> int:
    goal = _read_type(args.type)
    try:
        terms = enumerate_long(goal, args.depth, args.max_steps)
    except OracleBudgetExceeded as exc:
        print(str(exc))
        return EXIT_BUDGET
    for t in terms:
        print(show_term(t))
    print(f"# {len(terms)} long solution(s) up to depth {args.depth}")
    return EXIT_OK if terms else EXIT_NO


def _add_limits(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-configs", type=int, default=2_000_000, metavar="N")
    p.add_argument("--max-time", type=float, default=None, metavar="SECONDS")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rank2",
        description="Inhabitation of rank-two intersection types and ALBA cross-checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rank", help="print the rank of a type")
    p.add_argument("type", nargs="?", help="type text, or '-' / omitted for stdin")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("inhabit", help="decide inhabitation and print a witness")
    p.add_argument("type", nargs="?", help="type text, or '-' / omitted for stdin")
    p.add_argument("--emit-derivation", metavar="PATH")
    p.add_argument("--stats", action="store_true", help="print search statistics")
    _add_limits(p)
    p.set_defaults(func=cmd_inhabit)

    p = sub.add_parser("check", help="check a derivation file")
    p.add_argument("derivation")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gen-t", help="print the T(n) type")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_gen_t)

    p = sub.add_parser("reduce", help="encode a machine and word as a type")
    p.add_argument("machine")
    p.add_argument("word")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("alba", help="decide in-place acceptance")
    p.add_argument("machine")
    p.add_argument("word")
    p.set_defaults(func=cmd_alba)

    p = sub.add_parser("xcheck", help="compare solver and automaton")
    p.add_argument("machine", nargs="?")
    p.add_argument("word", nargs="?")
    p.add_argument("--sweep", choices=["exhaustive", "random"])
    p.add_argument("--count", type=int, default=500, help="random machines")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-states", type=int, default=3)
    p.add_argument("--lengths", default="2,3", help="comma-separated word lengths")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--report", metavar="PATH", help="also write the TSV report here")
    _add_limits(p)
    p.set_defaults(func=cmd_xcheck)

    p = sub.add_parser("enumerate", help="list long solutions up to a depth")
    p.add_argument("type")
    p.add_argument("depth", type=int)
    p.add_argument("--max-steps", type=int, default=None)
    p.set_defaults(func=cmd_enumerate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (
        UsageError,
        TypeSyntaxError,
        TermSyntaxError,
        DerivationFormatError,
        RankTooHigh,
        MachineError,
        OSError,
        json.JSONDecodeError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
