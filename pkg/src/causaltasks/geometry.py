"""Exact causal structure of flat spacetime with unit light speed.

Every quantity is an integer and every comparison is done on squared
intervals, so light-cone boundaries are classified without rounding.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Union

from .errors import DimensionMismatchError, InputError


def _as_int(value, name: str) -> int:
    # bool is an int subclass but never a coordinate
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(f"{name} must be an integer, got {value!r}")
    return value


@dataclass(frozen=True, order=True)
class Point:
    """A spacetime event: integer time ``t`` and integer spatial coordinates ``x``.

    ``x`` may be given as a single int for the 1-D case; it is stored as a tuple.
    """

    t: int
    x: tuple[int, ...]

    def __post_init__(self):
        _as_int(self.t, "t")
        xs = (self.x,) if isinstance(self.x, int) and not isinstance(self.x, bool) else self.x
        try:
            xs = tuple(_as_int(v, "x") for v in xs)
        except TypeError:
            raise InputError(f"x must be an integer or a sequence of integers, got {self.x!r}")
        if not xs:
            raise InputError("a point needs at least one spatial coordinate")
        object.__setattr__(self, "x", xs)

    @property
    def dim(self) -> int:
        return len(self.x)

    @property
    def pos(self) -> int:
        """Spatial position of a 1-D point."""
        if len(self.x) != 1:
            raise DimensionMismatchError(f"{self} is not one-dimensional")
        return self.x[0]

    def shifted(self, dt: int, dx: Iterable[int]) -> "Point":
        return Point(self.t + dt, tuple(a + b for a, b in zip(self.x, dx, strict=True)))

    def __str__(self) -> str:
        return f"({self.t},({','.join(map(str, self.x))}))"


PointLike = Union[Point, tuple]


class CausalClass(enum.Enum):
    """Where ``y`` sits relative to ``x``."""

    COINCIDENT = "coincident"
    CAUSAL_FUTURE = "future"
    CAUSAL_PAST = "past"
    SPACELIKE = "spacelike"


def _check_dims(x: Point, y: Point) -> None:
    if x.dim != y.dim:
        raise DimensionMismatchError(f"cannot compare {x} ({x.dim}-D) with {y} ({y.dim}-D)")


def classify(x: Point, y: Point) -> CausalClass:
    _check_dims(x, y)
    dt = y.t - x.t
    q = sum((b - a) ** 2 for a, b in zip(x.x, y.x))
    if dt == 0 and q == 0:
        return CausalClass.COINCIDENT
    if dt * dt >= q:
        # lightlike separation counts as causal; dt == 0 here forces q == 0, handled above
        return CausalClass.CAUSAL_FUTURE if dt > 0 else CausalClass.CAUSAL_PAST
    return CausalClass.SPACELIKE


def precedes(x: Point, y: Point) -> bool:
    """True when ``y`` is ``x`` or lies on or inside its future light cone."""
    return classify(x, y) in (CausalClass.COINCIDENT, CausalClass.CAUSAL_FUTURE)


def strictly_precedes(x: Point, y: Point) -> bool:
    return classify(x, y) is CausalClass.CAUSAL_FUTURE


def earliest_arrival(t_emit: int, x_from: int, x_to: int) -> int:
    """Time a light signal emitted at ``x_from`` reaches ``x_to`` on a line."""
    return t_emit + abs(x_to - x_from)
