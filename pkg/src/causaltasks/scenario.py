"""Flat ``key = value`` scenario files.

One pair per line, ``#`` starts a comment.  Keys::

    task     = summoning | refined | original
    mode     = single | multiple              (summoning)
    promise  = exactly_one | at_least_one     (refined)
    D        = <int>                          (refined, original)
    eps      = <int>                          (refined)
    start    = <t>,<x>                        (summoning)
    pair     = <ct>,<cx> -> <rt>,<rx>         (summoning, repeatable)
    window   = <xmin>,<xmax>,<tmax>           (optional)
    states   = <S>                            (optional, refined/original)
    alphabet = <A>                            (optional, refined/original)

Causal validity of summoning pairs is not a parse error; ``validate``
reports it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import InputError
from .geometry import Point
from .lattice import LatticeScenario, original_scenario, refined_scenario
from .search import SearchBounds
from .tasks import (CallMode, CallReturnPair, OriginalSignalTask, Promise, RefinedBitTask,
                    SummoningTask)
from .token import Window

_INT = r"[+-]?[0-9]+"
_INT_RE = re.compile(rf"^{_INT}$")
_TUPLE = {2: re.compile(rf"^({_INT})\s*,\s*({_INT})$"),
          3: re.compile(rf"^({_INT})\s*,\s*({_INT})\s*,\s*({_INT})$")}
_PAIR_RE = re.compile(rf"^({_INT})\s*,\s*({_INT})\s*->\s*({_INT})\s*,\s*({_INT})$")

KEYS = ("task", "mode", "promise", "D", "eps", "start", "pair", "window", "states", "alphabet")
_REQUIRED = {
    "summoning": ("task", "mode", "start", "pair"),
    "refined": ("task", "promise", "D", "eps"),
    "original": ("task", "D"),
}
_OPTIONAL = {
    "summoning": ("window",),
    "refined": ("window", "states", "alphabet"),
    "original": ("window", "states", "alphabet"),
}


class ScenarioError(InputError):
    def __init__(self, line: int | None, reason: str):
        super().__init__(f"line {line}: {reason}" if line else reason)
        self.line = line
        self.reason = reason


@dataclass(frozen=True)
class ScenarioDocument:
    task: str
    mode: str | None = None
    promise: str | None = None
    D: int | None = None
    eps: int | None = None
    start: tuple[int, int] | None = None
    pairs: tuple[tuple[int, int, int, int], ...] = ()
    window: tuple[int, int, int] | None = None
    states: int | None = None
    alphabet: int | None = None

    def to_task(self):
        if self.task == "summoning":
            pairs = tuple(CallReturnPair(Point(ct, (cx,)), Point(rt, (rx,))) for ct, cx, rt, rx in self.pairs)
            return SummoningTask(Point(self.start[0], (self.start[1],)), pairs, CallMode(self.mode))
        if self.task == "refined":
            return RefinedBitTask(self.D, self.eps, Promise(self.promise))
        return OriginalSignalTask(self.D)

    def lattice_window(self) -> Window | None:
        return None if self.window is None else Window(*self.window)

    def to_scenario(self, relay_site: int | None = None) -> LatticeScenario:
        task = self.to_task()
        if isinstance(task, RefinedBitTask):
            return refined_scenario(task, window=self.lattice_window())
        if isinstance(task, OriginalSignalTask):
            return original_scenario(task, relay_site, window=self.lattice_window())
        raise InputError("summoning tasks run on the token model, not the agent lattice")

    def bounds(self, scenario: LatticeScenario, budget: float | None = None) -> SearchBounds:
        return SearchBounds(states=self.states or 1,
                            alphabet=self.alphabet or scenario.n_symbols, budget=budget)


def _int(value: str, line: int, key: str) -> int:
    if not _INT_RE.match(value):
        raise ScenarioError(line, f"{key} must be a decimal integer, got {value!r}")
    return int(value)


def _tuple(value: str, n: int, line: int, key: str) -> tuple[int, ...]:
    m = _TUPLE[n].match(value)
    if not m:
        raise ScenarioError(line, f"{key} must be {n} comma-separated integers, got {value!r}")
    return tuple(int(g) for g in m.groups())


def parse_scenario(text) -> ScenarioDocument:
    """Parse scenario text (``str`` or UTF-8 ``bytes``); raises :class:`ScenarioError`."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ScenarioError(None, f"input is not valid UTF-8 (byte {exc.start})") from None
    if not isinstance(text, str):
        raise ScenarioError(None, "scenario input must be text")

    seen: dict[str, int] = {}
    raw: dict[str, str] = {}
    pairs: list[tuple[int, str]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ScenarioError(lineno, f"expected 'key = value', got {body!r}")
        key, value = (part.strip() for part in body.split("=", 1))
        if key not in KEYS:
            raise ScenarioError(lineno, f"unknown key {key!r}")
        if key == "pair":
            pairs.append((lineno, value))
            seen.setdefault("pair", lineno)
            continue
        if key in seen:
            raise ScenarioError(lineno, f"duplicate key {key!r} (first on line {seen[key]})")
        seen[key] = lineno
        raw[key] = value

    if "task" not in raw:
        raise ScenarioError(None, "missing required key 'task'")
    kind = raw["task"]
    if kind not in _REQUIRED:
        raise ScenarioError(seen["task"], f"task must be summoning, refined or original, got {kind!r}")
    allowed = set(_REQUIRED[kind]) | set(_OPTIONAL[kind])
    for key, lineno in sorted(seen.items(), key=lambda kv: kv[1]):
        if key not in allowed:
            raise ScenarioError(lineno, f"key {key!r} does not apply to {kind} tasks")
    for key in _REQUIRED[kind]:
        if key not in seen:
            raise ScenarioError(None, f"missing required key {key!r}")

    fields: dict = {"task": kind}
    if "mode" in raw:
        if raw["mode"] not in ("single", "multiple"):
            raise ScenarioError(seen["mode"], f"mode must be single or multiple, got {raw['mode']!r}")
        fields["mode"] = raw["mode"]
    if "promise" in raw:
        if raw["promise"] not in ("exactly_one", "at_least_one"):
            raise ScenarioError(seen["promise"], f"promise must be exactly_one or at_least_one, got {raw['promise']!r}")
        fields["promise"] = raw["promise"]
    for key in ("D", "eps", "states", "alphabet"):
        if key in raw:
            fields[key] = _int(raw[key], seen[key], key)
    if "start" in raw:
        fields["start"] = _tuple(raw["start"], 2, seen["start"], "start")
    if "window" in raw:
        fields["window"] = _tuple(raw["window"], 3, seen["window"], "window")
    parsed_pairs = []
    for lineno, value in pairs:
        m = _PAIR_RE.match(value)
        if not m:
            raise ScenarioError(lineno, f"pair must look like '<ct>,<cx> -> <rt>,<rx>', got {value!r}")
        parsed_pairs.append(tuple(int(g) for g in m.groups()))
    fields["pairs"] = tuple(parsed_pairs)

    doc = ScenarioDocument(**fields)
    _check_invariants(doc, seen, pairs)
    return doc


def _check_invariants(doc: ScenarioDocument, seen: dict, pair_lines: list) -> None:
    if doc.D is not None and doc.D < 1:
        raise ScenarioError(seen["D"], "D must be ≥ 1")
    if doc.eps is not None and doc.eps < 1:
        raise ScenarioError(seen["eps"], "eps must be ≥ 1")
    if doc.states is not None and doc.states < 1:
        raise ScenarioError(seen["states"], "states must be ≥ 1")
    if doc.alphabet is not None and doc.alphabet < 2:
        raise ScenarioError(seen["alphabet"], "alphabet must be ≥ 2")
    if doc.window is not None:
        xmin, xmax, tmax = doc.window
        if xmin > xmax or tmax < 0:
            raise ScenarioError(seen["window"], "window must satisfy xmin ≤ xmax and tmax ≥ 0")
    if doc.task == "summoning":
        dup = {}
        for (lineno, _), p in zip(pair_lines, doc.pairs):
            if p in dup:
                raise ScenarioError(lineno, f"pairs must be pairwise distinct (repeats line {dup[p]})")
            dup[p] = lineno
    try:
        doc.to_task()
        if doc.window is not None and doc.task != "summoning":
            doc.to_scenario()
    except InputError as exc:
        line = seen.get("D") if "D" in str(exc) else seen.get("window") if doc.window else None
        raise ScenarioError(line, str(exc)) from None


def format_scenario(doc: ScenarioDocument) -> str:
    lines = [f"task = {doc.task}"]
    if doc.mode is not None:
        lines.append(f"mode = {doc.mode}")
    if doc.promise is not None:
        lines.append(f"promise = {doc.promise}")
    for key in ("D", "eps"):
        v = getattr(doc, key)
        if v is not None:
            lines.append(f"{key} = {v}")
    if doc.start is not None:
        lines.append(f"start = {doc.start[0]},{doc.start[1]}")
    for ct, cx, rt, rx in doc.pairs:
        lines.append(f"pair = {ct},{cx} -> {rt},{rx}")
    if doc.window is not None:
        lines.append("window = " + ",".join(map(str, doc.window)))
    for key in ("states", "alphabet"):
        v = getattr(doc, key)
        if v is not None:
            lines.append(f"{key} = {v}")
    return "\n".join(lines) + "\n"


def document_for(task: SummoningTask, window: Window | None = None) -> ScenarioDocument:
    return ScenarioDocument(
        task="summoning", mode=task.mode.value,
        start=(task.start.t, task.start.pos),
        pairs=tuple((p.call.t, p.call.pos, p.ret.t, p.ret.pos) for p in task.pairs),
        window=None if window is None else (window.x_min, window.x_max, window.t_max))


def format_inline(doc: ScenarioDocument) -> str:
    """The same serialization on one line, no spaces: ``task=... start=... pair=...``."""
    return " ".join(line.replace(" ", "") for line in format_scenario(doc).splitlines())


def parse_pattern(task, text: str):
    """``"1,2"`` / ``"{1,2}"`` for summoning and original tasks, ``"0,1"`` / ``"(0,1)"`` for refined."""
    body = text.strip().strip("{}()[]").strip()
    parts = [p.strip() for p in body.split(",")] if body else []
    if not parts or not all(_INT_RE.match(p) for p in parts):
        raise InputError(f"cannot read pattern {text!r}")
    values = [int(p) for p in parts]
    pattern = tuple(values) if isinstance(task, RefinedBitTask) else frozenset(values)
    if pattern not in task.admissible_patterns():
        raise InputError(f"pattern {text!r} is not admissible for this task")
    return pattern
