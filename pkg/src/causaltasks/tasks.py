"""Task families, their admissible call patterns and success predicates.

Three families are modelled:

* ``SummoningTask``: a start point and call/return pairs; Bob calls some
  of the ``c_i`` and a single delivery must land on a matching ``r_i``.
* ``RefinedBitTask``: two wings ``B_0 A_0 ... A_1 B_1``; each ``B_i`` sends
  a bit at ``t=0`` and must get back one bit by ``t=2*eps``, one 0 and one 1,
  with the 1 going to a wing that sent a 1.
* ``OriginalSignalTask``: two labs ``L`` and ``R`` at distance ``D``; a
  request at a lab asks for a light signal to the far lab arriving at
  ``T=D`` with nothing delivered the other way.

Call patterns are plain values: a ``frozenset`` of 1-based pair indices for
summoning, a ``(b0, b1)`` tuple of input bits for the refined task, and a
``frozenset`` drawn from ``{1, 2}`` (the requested tasks) for the original task.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Sequence

from .errors import DimensionMismatchError, InputError
from .geometry import Point, classify, strictly_precedes

class CallMode(enum.Enum):
    SINGLE = "single"  # exactly one call occurs
    MULTIPLE = "multiple"  # any nonempty subset of calls occurs


class Promise(enum.Enum):
    EXACTLY_ONE = "exactly_one"
    AT_LEAST_ONE = "at_least_one"


@dataclass(frozen=True)
class Delivery:
    """Something handed to Bob at spacetime point ``at``."""

    at: Point
    symbol: str | None = None


@dataclass(frozen=True)
class CallReturnPair:
    call: Point
    ret: Point

    def __post_init__(self):
        if self.call.dim != self.ret.dim:
            raise DimensionMismatchError(f"call {self.call} and return {self.ret} differ in dimension")


def subsets(indices: Sequence[int]) -> list[frozenset]:
    """Nonempty subsets, by size then lexicographically."""
    out = []
    for k in range(1, len(indices) + 1):
        out.extend(frozenset(c) for c in itertools.combinations(indices, k))
    return out


def format_pattern(pattern) -> str:
    if isinstance(pattern, tuple):
        return "(" + ",".join(str(b) for b in pattern) + ")"
    return "{" + ",".join(str(i) for i in sorted(pattern)) + "}"


# --------------------------------------------------------------------- summoning


@dataclass(frozen=True)
class SummoningTask:
    start: Point
    pairs: tuple[CallReturnPair, ...]
    mode: CallMode = CallMode.SINGLE

    def __post_init__(self):
        pairs = tuple(self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if not pairs:
            raise InputError("a summoning task needs at least one call/return pair")
        dim = self.start.dim
        for p in pairs:
            if p.call.dim != dim or p.ret.dim != dim:
                raise DimensionMismatchError("all task points must share one dimension")
        if len(set(pairs)) != len(pairs):
            raise InputError("call/return pairs must be pairwise distinct")

    @property
    def n(self) -> int:
        return len(self.pairs)

    def pair(self, i: int) -> CallReturnPair:
        """Pair by its 1-based index."""
        return self.pairs[i - 1]

    def admissible_patterns(self) -> list[frozenset]:
        idx = range(1, self.n + 1)
        if self.mode is CallMode.SINGLE:
            return [frozenset([i]) for i in idx]
        return subsets(list(idx))

    def violations(self, pattern, deliveries: Sequence[Delivery]) -> list[str]:
        _check_admissible(self, pattern)
        _check_deliveries(deliveries, self.start.dim)
        if len(deliveries) != 1:
            return [f"expected exactly one delivery, got {len(deliveries)}"]
        at = deliveries[0].at
        if any(self.pair(i).ret == at for i in pattern):
            return []
        return [f"delivery at {at} is not the return point of a called pair"]


@dataclass(frozen=True)
class PairCheck:
    index: int
    ok: bool
    reasons: tuple[str, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[PairCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> tuple[PairCheck, ...]:
        return tuple(c for c in self.checks if not c.ok)


def _why_not_after(a: Point, b: Point, a_name: str, b_name: str) -> str:
    cls = classify(a, b).value
    return f"{b_name} {b} is not strictly after {a_name} {a} ({cls})"


def validate_summoning(task: SummoningTask) -> ValidationReport:
    checks = []
    for i, p in enumerate(task.pairs, start=1):
        reasons = []
        if not strictly_precedes(p.call, p.ret):
            reasons.append(_why_not_after(p.call, p.ret, "call", "return"))
        if not strictly_precedes(task.start, p.ret):
            reasons.append(_why_not_after(task.start, p.ret, "start", "return"))
        checks.append(PairCheck(i, not reasons, tuple(reasons)))
    return ValidationReport(tuple(checks))


# -------------------------------------------------------------------- refined bit


@dataclass(frozen=True)
class RefinedBitTask:
    D: int
    eps: int
    promise: Promise = Promise.AT_LEAST_ONE

    def __post_init__(self):
        for name in ("D", "eps"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise InputError(f"{name} must be an integer")
        if self.eps < 1:
            raise InputError("eps must be ≥ 1")
        if self.D < 1:
            raise InputError("D must be ≥ 1")
        if self.D < 2 * self.eps:
            raise InputError("D must be ≥ 2·eps")

    @property
    def a_sites(self) -> tuple[int, int]:
        return (0, self.D)

    @property
    def b_sites(self) -> tuple[int, int]:
        return (-self.eps, self.D + self.eps)

    @property
    def layout(self) -> tuple[int, int, int, int]:
        """Positions of B_0, A_0, A_1, B_1."""
        return (-self.eps, 0, self.D, self.D + self.eps)

    @property
    def deadline(self) -> int:
        return 2 * self.eps

    def admissible_patterns(self) -> list[tuple[int, int]]:
        if self.promise is Promise.EXACTLY_ONE:
            return [(0, 1), (1, 0)]
        return [(0, 1), (1, 0), (1, 1)]

    def violations(self, pattern, deliveries: Sequence[Delivery]) -> list[str]:
        _check_admissible(self, pattern)
        _check_deliveries(deliveries, 1)
        received: dict[int, list[str | None]] = {0: [], 1: []}
        for d in deliveries:
            if d.at.pos not in self.b_sites:
                raise InputError(f"delivery at {d.at} is not at a B site")
            if d.at.t <= self.deadline:
                received[self.b_sites.index(d.at.pos)].append(d.symbol)
        problems = []
        for i in (0, 1):
            if len(received[i]) != 1:
                problems.append(f"B_{i} received {len(received[i])} bits by t={self.deadline}")
            elif received[i][0] not in ("0", "1"):
                problems.append(f"B_{i} received non-bit {received[i][0]!r}")
        if problems:
            return problems
        bits = (received[0][0], received[1][0])
        if sorted(bits) != ["0", "1"]:
            return [f"returned bits {bits[0]},{bits[1]} are not one 0 and one 1"]
        winner = bits.index("1")
        if pattern[winner] != 1:
            return [f"the 1 went to B_{winner}, which sent a 0"]
        return []


# ------------------------------------------------------------------- original task


@dataclass(frozen=True)
class OriginalSignalTask:
    D: int

    L = 0

    def __post_init__(self):
        if isinstance(self.D, bool) or not isinstance(self.D, int):
            raise InputError("D must be an integer")
        if self.D < 1:
            raise InputError("D must be ≥ 1")
        if self.D < 2:
            raise InputError("D must be ≥ 2 to leave room for a relay site")

    @property
    def R(self) -> int:
        return self.D

    @property
    def T(self) -> int:
        return self.D

    def destination(self, request: int) -> int:
        """Task 1 sends L→R, Task 2 sends R→L."""
        return self.R if request == 1 else self.L

    def admissible_patterns(self) -> list[frozenset]:
        return subsets([1, 2])

    def fulfilled(self, pattern, deliveries: Sequence[Delivery]) -> frozenset:
        _check_admissible(self, pattern)
        _check_deliveries(deliveries, 1)
        for d in deliveries:
            if d.at.pos not in (self.L, self.R):
                raise InputError(f"delivery at {d.at} is not at a lab")
        window = [d for d in deliveries if 0 <= d.at.t <= self.T]
        at = {self.L: [d.at.t for d in window if d.at.pos == self.L],
              self.R: [d.at.t for d in window if d.at.pos == self.R]}
        done = set()
        for req in pattern:
            dest = self.destination(req)
            other = self.L if dest == self.R else self.R
            if self.T in at[dest] and not at[other]:
                done.add(req)
        return frozenset(done)

    def violations(self, pattern, deliveries: Sequence[Delivery]) -> list[str]:
        if self.fulfilled(pattern, deliveries):
            return []
        return [f"no requested task fulfilled for requests {format_pattern(pattern)}"]


# ------------------------------------------------------------------ shared helpers


def _check_admissible(task, pattern) -> None:
    if pattern not in task.admissible_patterns():
        raise InputError(f"pattern {pattern!r} is not admissible for this task")


def _check_deliveries(deliveries, dim: int) -> None:
    for d in deliveries:
        if not isinstance(d, Delivery) or not isinstance(d.at, Point):
            raise InputError(f"malformed delivery record {d!r}")
        if d.at.dim != dim:
            raise DimensionMismatchError(f"delivery at {d.at} has the wrong dimension")


def admissible_patterns(task) -> list:
    return list(task.admissible_patterns())


def violations(task, pattern, outcome: Sequence[Delivery]) -> list[str]:
    """Every requirement ``outcome`` breaks under ``pattern``; empty on success."""
    if isinstance(outcome, (str, bytes)) or not hasattr(outcome, "__iter__"):
        raise InputError(f"malformed outcome summary {outcome!r}")
    return task.violations(pattern, list(outcome))


def success_predicate(task, pattern, outcome: Sequence[Delivery]) -> bool:
    return not violations(task, pattern, outcome)


def fulfilled_tasks(task: OriginalSignalTask, pattern, outcome: Sequence[Delivery]) -> frozenset:
    return task.fulfilled(pattern, list(outcome))
