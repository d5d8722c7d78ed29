"""Classical summoning with one unclonable token on a 1-D lattice.

The token starts at ``s`` and moves at most one site per step; it can be
delivered once.  Calls are classical data: whether ``c_i`` was called is
known at every point on or inside the future light cone of ``c_i``, and
at such a point the absence of a call is known too.  A plan chooses its
action from ``(t, x, knowledge)`` alone.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .errors import DimensionMismatchError, InputError, PlanIncompleteError
from .geometry import Point, precedes
from .tasks import CallMode, SummoningTask, validate_summoning

DELIVER = "deliver"
MOVES = (-1, 0, 1)


class CallStatus(enum.Enum):
    CALLED = "C"
    NOT_CALLED = "N"
    UNKNOWN = "?"


Knowledge = tuple  # CallStatus per pair, position i-1 for pair i


@dataclass(frozen=True)
class Window:
    """Lattice bounds ``x_min <= x <= x_max``, ``t_min <= t <= t_max``."""

    x_min: int
    x_max: int
    t_max: int
    t_min: int = 0

    def __post_init__(self):
        if self.x_min > self.x_max or self.t_min > self.t_max:
            raise InputError("empty window")

    def contains(self, p: Point) -> bool:
        return self.x_min <= p.pos <= self.x_max and self.t_min <= p.t <= self.t_max

    @classmethod
    def around(cls, task: SummoningTask) -> "Window":
        pts = _task_points(task)
        return cls(min(p.pos for p in pts), max(p.pos for p in pts),
                   max(p.t for p in pts), min(p.t for p in pts))


def _task_points(task: SummoningTask) -> list[Point]:
    return [task.start] + [q for p in task.pairs for q in (p.call, p.ret)]


def check_token_task(task: SummoningTask) -> None:
    if task.start.dim != 1:
        raise DimensionMismatchError("the token model is one-dimensional")
    report = validate_summoning(task)
    if not report.ok:
        bad = report.failures[0]
        raise InputError(f"invalid task: pair {bad.index}: {bad.reasons[0]}")


def knowledge_at(location: Point, pattern, task: SummoningTask) -> Knowledge:
    if location.dim != task.start.dim:
        raise DimensionMismatchError(f"{location} does not match the task dimension")
    out = []
    for i, pair in enumerate(task.pairs, start=1):
        if not precedes(pair.call, location):
            out.append(CallStatus.UNKNOWN)
        elif i in pattern:
            out.append(CallStatus.CALLED)
        else:
            out.append(CallStatus.NOT_CALLED)
    return tuple(out)


@dataclass(frozen=True)
class TokenPlan:
    """Lookup-table plan: ``(t, x, knowledge) -> move or DELIVER``."""

    table: Mapping[tuple, object] = field(default_factory=dict)

    def __call__(self, t: int, x: int, knowledge: Knowledge):
        try:
            return self.table[(t, x, knowledge)]
        except KeyError:
            raise PlanIncompleteError((t, x, knowledge)) from None

    def __len__(self) -> int:
        return len(self.table)


@dataclass(frozen=True)
class TokenRun:
    trajectory: tuple[Point, ...]
    knowledge: tuple[Knowledge, ...]
    delivered_at: Point | None
    success: bool


def plan_run(task: SummoningTask, plan: Callable[[int, int, Knowledge], object], pattern) -> TokenRun:
    check_token_task(task)
    if pattern not in task.admissible_patterns():
        raise InputError(f"pattern {pattern!r} is not admissible for this task")
    horizon = max(p.ret.t for p in task.pairs)
    t, x = task.start.t, task.start.pos
    trajectory, knowledge = [], []
    delivered = None
    while True:
        here = Point(t, (x,))
        k = knowledge_at(here, pattern, task)
        trajectory.append(here)
        knowledge.append(k)
        action = plan(t, x, k)
        if action == DELIVER:
            delivered = here
            break
        if action not in MOVES:
            raise InputError(f"plan returned {action!r} at {here}; expected -1, 0, +1 or deliver")
        if t >= horizon:
            break
        t, x = t + 1, x + action
    success = delivered is not None and any(task.pair(i).ret == delivered for i in pattern)
    return TokenRun(tuple(trajectory), tuple(knowledge), delivered, success)


@dataclass(frozen=True)
class TokenResult:
    feasible: bool
    plan: TokenPlan | None
    states_explored: int

    @property
    def verdict(self) -> str:
        return "feasible" if self.feasible else "infeasible"


def token_feasible(task: SummoningTask, window: Window | None = None) -> TokenResult:
    """AND-OR search over ``(t, x, patterns still consistent with what is known)``.

    Alice picks an action at each node; every pattern class that her next
    point can distinguish must then be won separately.
    """
    check_token_task(task)
    window = window or Window.around(task)
    for p in _task_points(task):
        if not window.contains(p):
            raise InputError(f"window does not contain task point {p}")
    patterns = task.admissible_patterns()
    horizon = max(p.ret.t for p in task.pairs)
    memo: dict = {}

    def classes(t, x, group):
        here = Point(t, (x,))
        split: dict = {}
        for p in group:
            split.setdefault(knowledge_at(here, p, task), []).append(p)
        return [(k, frozenset(v)) for k, v in split.items()]

    def win(t, x, group):
        key = (t, x, group)
        if key in memo:
            return memo[key]
        here = Point(t, (x,))
        action = None
        if all(any(task.pair(i).ret == here for i in p) for p in group):
            action = DELIVER
        elif t < horizon:
            for dx in MOVES:
                nx = x + dx
                if window.x_min <= nx <= window.x_max and all(
                        win(t + 1, nx, g) is not None for _, g in classes(t + 1, nx, group)):
                    action = dx
                    break
        memo[key] = action
        return action

    s = task.start
    roots = classes(s.t, s.pos, frozenset(patterns))
    if not all(win(s.t, s.pos, g) is not None for _, g in roots):
        return TokenResult(False, None, len(memo))

    table = {}
    stack = [(s.t, s.pos, k, g) for k, g in roots]
    while stack:
        t, x, k, g = stack.pop()
        if (t, x, k) in table:
            continue
        action = memo[(t, x, g)]
        table[(t, x, k)] = action
        if action != DELIVER:
            stack.extend((t + 1, x + action, k2, g2) for k2, g2 in classes(t + 1, x + action, g))
    return TokenResult(True, TokenPlan(table), len(memo))


def with_mode(task: SummoningTask, mode: CallMode) -> SummoningTask:
    return SummoningTask(task.start, task.pairs, mode)
