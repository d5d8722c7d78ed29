"""Command-line entry point: ``causaltasks <subcommand> ...``."""

from __future__ import annotations

import argparse
import sys

from .demos import DEMOS, run_demo
from .errors import InputError, ResourceLimitError
from .lattice import absorb_strategy, make_echo_strategy, make_relay_strategy, run
from .report import (EXIT_BUDGET, EXIT_FAIL, EXIT_INPUT, EXIT_OK, Report, RunOutcome,
                     format_report, yes)
from .scenario import parse_pattern, parse_scenario
from .search import decide_feasible, local_response_space
from .sweep import DEFAULT_WINDOW
from .tasks import OriginalSignalTask, RefinedBitTask, SummoningTask, validate_summoning
from .token import Window, plan_run, token_feasible


def _load(path: str):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return parse_scenario(data)


def _triple(text: str) -> Window:
    try:
        xmin, xmax, tmax = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected xmin,xmax,tmax") from None
    return Window(xmin, xmax, tmax)


def cmd_validate(args) -> Report:
    doc = _load(args.file)
    task = doc.to_task()
    if isinstance(task, SummoningTask):
        return format_report(validate_summoning(task))
    rep = Report()
    if isinstance(task, RefinedBitTask):
        rep.human.append("refined two-wing task is well formed")
        rep.machine.append("layout=" + ",".join(map(str, task.layout)) + f" deadline={task.deadline}")
    else:
        rep.human.append("two-lab signalling task is well formed")
        rep.machine.append(f"L={task.L} R={task.R} T={task.T}")
    rep.machine.append("valid=true")
    return rep


def _token_run_report(task, result, pattern) -> Report:
    if not result.feasible:
        rep = Report(exit_code=EXIT_FAIL)
        rep.human.append("no token plan wins every pattern; nothing to run")
        rep.machine.append("verdict=infeasible success=false")
        return rep
    tr = plan_run(task, result.plan, pattern)
    rep = Report(exit_code=EXIT_OK if tr.success else EXIT_FAIL)
    prev = None
    for p in tr.trajectory:
        step = "-" if prev is None or prev.pos == p.pos else ("R" if p.pos > prev.pos else "L")
        rep.machine.append(f"t={p.t} x={p.pos} kind=move sym=token dir={step}")
        prev = p
    if tr.delivered_at is not None:
        rep.machine.append(f"t={tr.delivered_at.t} x={tr.delivered_at.pos} kind=deliver sym=token dir=-")
    rep.human.append("token delivered at a called return point" if tr.success else "token run failed")
    rep.machine.append(f"deliveries={int(tr.delivered_at is not None)}")
    rep.machine.append(f"success={yes(tr.success)}")
    return rep


def cmd_run(args) -> Report:
    doc = _load(args.file)
    task = doc.to_task()
    pattern = parse_pattern(task, args.pattern)
    if isinstance(task, SummoningTask):
        return _token_run_report(task, token_feasible(task, doc.lattice_window()), pattern)
    sc = doc.to_scenario(args.relay)
    if args.strategy == "absorb":
        strat = absorb_strategy(sc)
    elif isinstance(task, RefinedBitTask):
        strat = make_echo_strategy(task)
    else:
        strat = make_relay_strategy(task, _relay_site(sc))
    tr = run(sc, strat, pattern)
    problems = tuple(task.violations(pattern, tr.deliveries))
    fulfilled = task.fulfilled(pattern, tr.deliveries) if isinstance(task, OriginalSignalTask) else None
    return format_report(RunOutcome(tr, problems, fulfilled))


def _relay_site(sc) -> int:
    return next(site for site, a in sc.agents.items() if a.label == "C")


def cmd_search(args) -> Report:
    doc = _load(args.file)
    if doc.task == "summoning":
        raise InputError("use the 'token' subcommand for summoning tasks")
    sc = doc.to_scenario(args.relay)
    bounds = doc.bounds(sc, args.budget)
    space = local_response_space(sc) if args.space == "local" else None
    result = decide_feasible(sc, bounds, space=space, workers=args.parallel)
    return format_report(result, max_certificates=args.max_certificates)


def cmd_token(args) -> Report:
    doc = _load(args.file)
    if doc.task != "summoning":
        raise InputError("the 'token' subcommand takes summoning tasks")
    return format_report(token_feasible(doc.to_task(), doc.lattice_window()))


def cmd_demo(args) -> Report:
    params = {"workers": args.parallel, "D": args.D, "eps": args.eps, "relay": args.relay,
              "states": args.states, "window": args.window, "pairs": args.pairs}
    return run_demo(args.name, **params)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "machine"), default="human")
    common.add_argument("--parallel", type=int, default=1, metavar="N", help="worker processes")

    parser = argparse.ArgumentParser(prog="causaltasks", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a scenario file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", parents=[common], help="run the built-in strategy on one pattern")
    p.add_argument("file")
    p.add_argument("--pattern", required=True)
    p.add_argument("--relay", type=int, default=None, help="relay site for two-lab tasks")
    p.add_argument("--strategy", choices=("default", "absorb"), default="default")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("search", parents=[common], help="decide feasibility by exhaustive search")
    p.add_argument("file")
    p.add_argument("--space", choices=("transducer", "local"), default="transducer")
    p.add_argument("--relay", type=int, default=None)
    p.add_argument("--budget", type=float, default=None, metavar="SECONDS")
    p.add_argument("--max-certificates", type=int, default=1000)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("token", parents=[common], help="decide a summoning task in the token model")
    p.add_argument("file")
    p.set_defaults(func=cmd_token)

    p = sub.add_parser("demo", parents=[common], help="run a built-in check: " + ", ".join(DEMOS))
    p.add_argument("name")
    p.add_argument("--D", type=int, default=8)
    p.add_argument("--eps", type=int, default=1)
    p.add_argument("--relay", type=int, default=None, help="default: midpoint")
    p.add_argument("--states", type=int, default=2)
    p.add_argument("--window", type=_triple, default=DEFAULT_WINDOW, metavar="XMIN,XMAX,TMAX")
    p.add_argument("--pairs", type=int, default=2)
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.parallel < 1:
        print("error: --parallel must be ≥ 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        rep = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    if rep.exit_code == EXIT_INPUT:
        sys.stderr.write(rep.text("human"))
    else:
        sys.stdout.write(rep.text(args.format))
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
