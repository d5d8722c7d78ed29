"""Built-in end-to-end checks, one per scenario family."""

from __future__ import annotations

from .lattice import guaranteed_success, make_relay_strategy, original_scenario, refined_scenario, run
from .report import EXIT_FAIL, EXIT_INPUT, EXIT_OK, Report, yes
from .search import (SearchBounds, decide_feasible, enumerate_strategies, is_echo,
                     local_response_space, refined_local_search)
from .sweep import DEFAULT_WINDOW, monotonicity_sweep
from .tasks import OriginalSignalTask, Promise, RefinedBitTask, format_pattern


def _claim(rep: Report, holds: bool) -> Report:
    rep.machine.append(f"claim={'holds' if holds else 'fails'}")
    rep.exit_code = EXIT_OK if holds else EXIT_FAIL
    return rep


def relay_check(task: OriginalSignalTask, relay_site: int) -> list[tuple]:
    """(requests, deliveries, ok) for every request set with the relay at ``relay_site``."""
    sc = original_scenario(task, relay_site)
    strat = make_relay_strategy(task, relay_site)
    rows = []
    for req in sc.patterns:
        dels = run(sc, strat, req).deliveries
        ok = (len(dels) == 1 and dels[0].at.t == task.T
              and any(dels[0].at.pos == task.destination(r) for r in req))
        rows.append((req, dels, ok))
    return rows


def finkelstein_original(D: int = 8, relay: int | None = None, **_) -> Report:
    task = OriginalSignalTask(D)
    relay = D // 2 if relay is None else relay
    rep = Report()
    rep.human.append(f"two labs at x=0 and x={D}; a relay agent forwards the first signal it meets "
                     f"and intercepts any other")
    rep.human.append("check: every request set yields exactly one delivery, at t=T, "
                     "at the destination of a requested task")
    holds = True
    for req, dels, ok in relay_check(task, relay):
        holds &= ok
        where = ",".join("L" if d.at.pos == task.L else "R" for d in dels) or "-"
        times = ",".join(str(d.at.t) for d in dels) or "-"
        fulfilled = task.fulfilled(req, dels)
        rep.machine.append(f"relay={relay} requests={format_pattern(req)} deliveries={len(dels)} "
                           f"at={where} t={times} fulfilled={format_pattern(fulfilled)}")
    every = all(ok for site in range(1, D) for _, _, ok in relay_check(task, site))
    holds &= every
    rep.machine.append(f"relay_sites={D - 1} subsets=3 invariant={'holds' if every else 'fails'}")
    return _claim(rep, holds)


def finkelstein_refined_exactly_one(D: int = 8, eps: int = 1, workers: int = 1, **_) -> Report:
    task = RefinedBitTask(D, eps, Promise.EXACTLY_ONE)
    sc = refined_scenario(task)
    space = local_response_space(sc)
    winners = [i for i in range(len(space)) if guaranteed_success(sc, space[i]).success]
    result = decide_feasible(sc, space=space, workers=workers)
    witness_echo = result.verdict == "feasible" and is_echo(task, result.witness)
    direct = refined_local_search(Promise.EXACTLY_ONE, D, eps)
    rep = Report()
    rep.human.append(f"two wings, D={D}, eps={eps}, exactly one 1 is sent")
    rep.human.append("check: among the 16 local response strategies exactly one always works, "
                     "and it returns each bit unchanged")
    rep.machine.append(f"strategies={len(space)} winners={len(winners)} "
                       f"witness={'echo' if witness_echo else result.verdict}")
    rep.machine.append(f"direct_winners={len(direct)}")
    return _claim(rep, len(winners) == 1 and witness_echo and len(direct) == 1)


def finkelstein_refined_at_least_one(D: int = 8, eps: int = 1, states: int = 2, workers: int = 1,
                                     **_) -> Report:
    task = RefinedBitTask(D, eps, Promise.AT_LEAST_ONE)
    sc = refined_scenario(task)
    space = local_response_space(sc)
    winners = [i for i in range(len(space)) if guaranteed_success(sc, space[i]).success]
    direct = refined_local_search(Promise.AT_LEAST_ONE, D, eps)
    bounds = SearchBounds(states=states, alphabet=sc.n_symbols)
    full = decide_feasible(sc, bounds, workers=workers)
    n_full = len(enumerate_strategies(sc, bounds))
    rep = Report()
    rep.human.append(f"two wings, D={D}, eps={eps}, at least one 1 is sent")
    rep.human.append(f"check: no local response strategy and no transducer strategy with ≤{states} "
                     f"states per agent always works")
    rep.machine.append(f"strategies={len(space)} winners={len(winners)}")
    rep.machine.append(f"direct_winners={len(direct)}")
    full_winners = 0 if full.verdict == "infeasible" else "unknown"
    rep.machine.append(f"transducer_states={states} transducer_strategies={n_full} "
                       f"transducer_winners={full_winners} verdict={full.verdict}")
    covered = full.verdict == "infeasible" and len(full.certificates) == n_full
    rep.machine.append(f"certificates_cover_all={yes(covered)}")
    return _claim(rep, not winners and not direct and covered)


def token_monotonicity(window=DEFAULT_WINDOW, pairs: int = 2, workers: int = 1, **_) -> Report:
    from .report import format_report

    result = monotonicity_sweep(window, pairs, workers=workers)
    rep = format_report(result)
    rep.human.insert(0, "check: giving Bob the option of several calls never makes a classical "
                        "token task impossible when a single call is possible")
    return _claim(rep, not result.counterexamples)


DEMOS = {
    "finkelstein-original": finkelstein_original,
    "finkelstein-refined-exactly-one": finkelstein_refined_exactly_one,
    "finkelstein-refined-at-least-one": finkelstein_refined_at_least_one,
    "token-monotonicity": token_monotonicity,
}


def run_demo(name: str, **params) -> Report:
    try:
        fn = DEMOS[name]
    except KeyError:
        rep = Report(exit_code=EXIT_INPUT)
        rep.human.append(f"unknown demo {name!r}; choose one of: {', '.join(DEMOS)}")
        return rep
    return fn(**params)
