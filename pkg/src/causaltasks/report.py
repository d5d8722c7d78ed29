"""Human and machine renderings of every result type, plus exit codes.

The machine section is one record per line, each record a run of
space-separated ``key=value`` fields; :func:`parse_machine` reads it back.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

from .lattice import Transcript
from .scenario import document_for, format_inline
from .search import Exhausted, Feasible, Infeasible
from .sweep import SweepReport
from .tasks import ValidationReport, format_pattern
from .token import TokenResult

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3

MAX_CERTIFICATE_LINES = 1000


@dataclass
class Report:
    human: list[str] = field(default_factory=list)
    machine: list[str] = field(default_factory=list)
    exit_code: int = EXIT_OK

    def text(self, fmt: str = "human") -> str:
        if fmt == "machine":
            lines = self.machine
        else:
            lines = self.human + ([""] if self.human else []) + self.machine
        return "\n".join(lines) + "\n"


def parse_machine(text: str) -> list[list[tuple[str, str]]]:
    records = []
    for line in text.splitlines():
        if not line.strip():
            continue
        fields = []
        for token in line.split():
            key, sep, value = token.partition("=")
            if not sep:
                raise ValueError(f"not a key=value field: {token!r}")
            fields.append((key, value))
        records.append(fields)
    return records


def yes(flag: bool) -> str:
    return "true" if flag else "false"


@dataclass(frozen=True)
class RunOutcome:
    """One strategy run against one pattern, judged by the task."""

    transcript: Transcript
    problems: tuple[str, ...]
    fulfilled: frozenset | None = None


@functools.singledispatch
def format_report(result, **kwargs) -> Report:
    raise TypeError(f"no report format for {type(result).__name__}")


@format_report.register
def _(result: ValidationReport, **kwargs) -> Report:
    rep = Report(exit_code=EXIT_OK if result.ok else EXIT_FAIL)
    rep.human.append("task is valid" if result.ok else f"{len(result.failures)} pair(s) fail validation")
    for c in result.checks:
        rep.human.extend(f"  pair {c.index}: {r}" for r in c.reasons)
        rep.machine.append(f"pair={c.index} ok={yes(c.ok)}")
    rep.machine.append(f"valid={yes(result.ok)}")
    return rep


@format_report.register
def _(result: RunOutcome, **kwargs) -> Report:
    ok = not result.problems
    rep = Report(exit_code=EXIT_OK if ok else EXIT_FAIL)
    rep.human.append(f"pattern {format_pattern(result.transcript.pattern)}: "
                     + ("success" if ok else "failure"))
    rep.human.extend(f"  {p}" for p in result.problems)
    rep.machine.extend(result.transcript.render())
    rep.machine.append(f"deliveries={len(result.transcript.deliveries)}")
    if result.fulfilled is not None:
        rep.machine.append(f"fulfilled={format_pattern(result.fulfilled)}")
    rep.machine.append(f"success={yes(ok)}")
    return rep


@format_report.register
def _(result: Feasible, **kwargs) -> Report:
    rep = Report(exit_code=EXIT_OK)
    name = result.witness.name
    rep.human.append(f"feasible: strategy #{result.index}" + (f" ({name})" if name else "")
                     + " succeeds on every admissible pattern")
    rep.machine.append("verdict=feasible")
    rep.machine.append(f"witness={result.index}" + (f" witness_name={name}" if name else ""))
    return rep


@format_report.register
def _(result: Infeasible, *, max_certificates: int = MAX_CERTIFICATE_LINES, **kwargs) -> Report:
    rep = Report(exit_code=EXIT_FAIL)
    n = len(result.certificates)
    rep.human.append(f"infeasible: all {n} enumerated strategies fail on some admissible pattern")
    rep.machine.append("verdict=infeasible")
    rep.machine.append(f"certificates={n}")
    shown = 0
    for idx in result.certificates:
        if shown >= max_certificates:
            break
        rep.machine.append(f"strategy={idx} fails_on={format_pattern(result.certificates[idx])}")
        shown += 1
    if shown < n:
        rep.human.append(f"(certificate lines truncated to the first {shown})")
        rep.machine.append(f"certificates_shown={shown}")
    return rep


@format_report.register
def _(result: Exhausted, **kwargs) -> Report:
    rep = Report(exit_code=EXIT_BUDGET)
    rep.human.append(f"budget of {result.budget}s ran out after {result.explored} strategies; no verdict")
    rep.machine.append("verdict=exhausted")
    rep.machine.append(f"explored={result.explored} budget={result.budget}")
    return rep


@format_report.register
def _(result: TokenResult, **kwargs) -> Report:
    rep = Report(exit_code=EXIT_OK if result.feasible else EXIT_FAIL)
    if result.feasible:
        rep.human.append(f"feasible: a token plan with {len(result.plan)} decision points wins every pattern")
    else:
        rep.human.append("infeasible: no token plan wins every admissible pattern")
    rep.machine.append(f"verdict={result.verdict}")
    rep.machine.append(f"plan_states={len(result.plan) if result.plan else 0} "
                       f"search_states={result.states_explored}")
    return rep


@format_report.register
def _(result: SweepReport, **kwargs) -> Report:
    bad = len(result.counterexamples)
    rep = Report(exit_code=EXIT_OK if not bad else EXIT_FAIL)
    w = result.window
    rep.human.append(f"swept all valid {result.n_pairs}-pair token tasks with x in [{w.x_min}, {w.x_max}], "
                     f"t in [{w.t_min}, {w.t_max}]")
    rep.human.append(f"{bad} task(s) are single-call feasible but multi-call infeasible")
    rep.machine.append(f"tasks={result.tasks} single_feasible={result.single_feasible} "
                       f"multi_feasible={result.multi_feasible} counterexamples={bad}")
    rep.machine.extend(format_inline(document_for(t)) for t in result.counterexamples)
    return rep
