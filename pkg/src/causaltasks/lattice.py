"""Synchronous 1+1-D lattice: agents, lightspeed messages, transcripts.

Time advances in integer steps and every message moves exactly one site per
step along a directed track.  At a step ``t`` an agent sees whatever arrives
at its site during ``t`` (one symbol per inbound track, plus an optional
external input) and may emit at ``t``; emissions reach the neighbouring site
at ``t+1``.  Forwarding therefore costs no processing time but never beats
light.

Sites without agents pass messages straight through.  Sink sites belong to
Bob: anything arriving there is delivered and absorbed, and is never shown to
an agent stationed at the same site.  Messages that walk off the lattice
window are dropped.

Symbols are encoded as small ints inside transducers: 0 is silence and
``1..k`` are the scenario's alphabet in order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

from .errors import InputError
from .geometry import Point
from .tasks import Delivery, OriginalSignalTask, RefinedBitTask, format_pattern

SILENT = 0
LEFT, RIGHT, EXTERNAL = "L", "R", "-"

_KIND_ORDER = {"deliver": 0, "move": 1, "emit": 2, "output": 3}


@dataclass(frozen=True)
class Ports:
    """Which tracks an agent reads and writes.  Disabled inputs read as silence."""

    in_left: bool = False
    in_right: bool = False
    ext_in: bool = False
    out_left: bool = False
    out_right: bool = False
    ext_out: bool = False

    @property
    def n_in(self) -> int:
        return self.in_left + self.in_right + self.ext_in

    @property
    def n_out(self) -> int:
        return self.out_left + self.out_right + self.ext_out


@dataclass(frozen=True)
class Agent:
    label: str
    ports: Ports


@dataclass(frozen=True)
class Injection:
    """An input event.

    ``heading`` is ``"L"`` or ``"R"`` for a message Bob launches from a sink
    site, or ``"-"`` for an external input handed to the agent at ``x``.
    """

    t: int
    x: int
    symbol: str
    heading: str


@dataclass(frozen=True)
class LatticeScenario:
    x_min: int
    x_max: int
    t_max: int
    agents: Mapping[int, Agent]
    sinks: Mapping[int, str]
    alphabet: tuple[str, ...]
    inputs: Mapping[object, tuple[Injection, ...]]
    task: object
    patterns: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "agents", dict(sorted(self.agents.items())))
        object.__setattr__(self, "sinks", dict(sorted(self.sinks.items())))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        if not self.patterns:
            object.__setattr__(self, "patterns", tuple(self.task.admissible_patterns()))
        object.__setattr__(self, "inputs", {p: tuple(v) for p, v in self.inputs.items()})
        self._validate()

    def _validate(self) -> None:
        if self.x_min > self.x_max or self.t_max < 0:
            raise InputError("empty lattice window")
        if len(set(self.alphabet)) != len(self.alphabet) or not self.alphabet:
            raise InputError("alphabet must be a nonempty set of distinct symbols")
        labels = [a.label for a in self.agents.values()]
        if len(set(labels)) != len(labels):
            raise InputError("agent labels must be distinct")
        for site in list(self.agents) + list(self.sinks):
            if not self.x_min <= site <= self.x_max:
                raise InputError(f"site {site} lies outside [{self.x_min}, {self.x_max}]")
        for p in self.patterns:
            if p not in self.inputs:
                raise InputError(f"no input events for pattern {format_pattern(p)}")
        for p, injections in self.inputs.items():
            seen = set()
            for inj in injections:
                key = (inj.t, inj.x, inj.heading)
                if key in seen:
                    raise InputError(f"duplicate injection at {key}")
                seen.add(key)
                if not 0 <= inj.t <= self.t_max:
                    raise InputError(f"injection time {inj.t} outside [0, {self.t_max}]")
                if inj.symbol not in self.alphabet:
                    raise InputError(f"injection symbol {inj.symbol!r} not in alphabet")
                if inj.heading == EXTERNAL:
                    agent = self.agents.get(inj.x)
                    if agent is None or not agent.ports.ext_in:
                        raise InputError(f"external input at x={inj.x} has no receiving agent")
                elif inj.heading in (LEFT, RIGHT):
                    if inj.x not in self.sinks or inj.x in self.agents:
                        raise InputError(f"launched message at x={inj.x} must start at an unstaffed sink")
                else:
                    raise InputError(f"unknown heading {inj.heading!r}")

    @property
    def n_symbols(self) -> int:
        """Alphabet size counting silence."""
        return len(self.alphabet) + 1

    def encode(self, symbol: str) -> int:
        return self.alphabet.index(symbol) + 1

    def decode(self, code: int) -> str | None:
        return None if code == SILENT else self.alphabet[code - 1]

    def isolated(self) -> bool:
        """True when no agent can influence another agent within the horizon."""
        sites = list(self.agents)
        return all(b - a > self.t_max for a, b in zip(sites, sites[1:]))


@dataclass(frozen=True)
class Transducer:
    """Deterministic finite-state transducer over the lattice alphabet.

    ``table`` is indexed by the encoded input ``(state, *enabled inputs)`` in
    mixed radix, state most significant and inputs in the order
    in_left, in_right, ext_in.  Each entry encodes ``(next_state, *enabled
    outputs)`` the same way with outputs ordered out_left, out_right, ext_out.
    """

    n_states: int
    n_symbols: int
    ports: Ports
    table: tuple[int, ...]
    initial: int = 0

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(self.table))
        if self.n_states < 1 or self.n_symbols < 2:
            raise InputError("a transducer needs ≥1 state and ≥2 symbols")
        if len(self.table) != self.n_states * self.n_symbols ** self.ports.n_in:
            raise InputError("transition table is not total over its domain")
        n_out = self.n_states * self.n_symbols ** self.ports.n_out
        if any(not 0 <= v < n_out for v in self.table):
            raise InputError("transition table entry out of range")
        if not 0 <= self.initial < self.n_states:
            raise InputError("initial state out of range")

    @classmethod
    def from_function(cls, n_states: int, n_symbols: int, ports: Ports,
                      fn: Callable[[int, int, int, int], tuple[int, int, int, int]],
                      initial: int = 0) -> "Transducer":
        """Tabulate ``fn(state, in_left, in_right, ext_in) -> (next, out_left, out_right, ext_out)``.

        Disabled inputs are passed as silence and disabled outputs are ignored.
        """
        enabled_in = [ports.in_left, ports.in_right, ports.ext_in]
        enabled_out = [ports.out_left, ports.out_right, ports.ext_out]
        table = []
        for state in range(n_states):
            for combo in _digits_all(n_symbols, ports.n_in):
                it = iter(combo)
                ins = [next(it) if on else SILENT for on in enabled_in]
                nxt, *outs = fn(state, *ins)
                code = nxt
                for on, sym in zip(enabled_out, outs):
                    if on:
                        code = code * n_symbols + sym
                table.append(code)
        return cls(n_states, n_symbols, ports, tuple(table), initial)

    def step(self, state: int, in_left: int, in_right: int, ext_in: int) -> tuple[int, int, int, int]:
        a = self.n_symbols
        p = self.ports
        idx = state
        if p.in_left:
            idx = idx * a + in_left
        if p.in_right:
            idx = idx * a + in_right
        if p.ext_in:
            idx = idx * a + ext_in
        code = self.table[idx]
        ext_out = out_right = out_left = SILENT
        if p.ext_out:
            code, ext_out = divmod(code, a)
        if p.out_right:
            code, out_right = divmod(code, a)
        if p.out_left:
            code, out_left = divmod(code, a)
        return code, out_left, out_right, ext_out

    @classmethod
    def null(cls, ports: Ports, n_symbols: int) -> "Transducer":
        """One state, never emits: absorbs everything it sees."""
        return cls(1, n_symbols, ports, (0,) * n_symbols ** ports.n_in)


def _digits_all(base: int, width: int):
    if width == 0:
        yield ()
        return
    for head in range(base):
        for tail in _digits_all(base, width - 1):
            yield (head,) + tail


@dataclass(frozen=True)
class Strategy:
    """One transducer per agent site."""

    agents: Mapping[int, Transducer]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "agents", dict(sorted(self.agents.items())))

    def __hash__(self):
        return hash(tuple(self.agents.items()))


@dataclass(frozen=True)
class Event:
    t: int
    x: int
    kind: str
    symbol: str
    direction: str
    msg: int = -1
    origin: int | None = None  # emitting agent site, None for Bob's launches

    def render(self) -> str:
        return f"t={self.t} x={self.x} kind={self.kind} sym={self.symbol} dir={self.direction}"

    def sort_key(self):
        return (self.t, self.x, _KIND_ORDER[self.kind], self.direction, self.msg)


@dataclass(frozen=True)
class Transcript:
    pattern: object
    events: tuple[Event, ...]
    states: tuple[tuple[int, int, int], ...]  # (t, site, state while processing t)

    @property
    def deliveries(self) -> tuple[Delivery, ...]:
        return tuple(Delivery(Point(e.t, (e.x,)), e.symbol) for e in self.events if e.kind == "deliver")

    @property
    def outputs(self) -> tuple[Event, ...]:
        return tuple(e for e in self.events if e.kind == "output")

    def render(self) -> list[str]:
        return [e.render() for e in self.events]

    def restricted(self, x: int, t: int) -> tuple:
        """Everything observable at the single point ``(t, x)``."""
        evs = tuple((e.kind, e.symbol, e.direction, e.origin) for e in self.events if e.t == t and e.x == x)
        sts = tuple(s for (tt, site, s) in self.states if tt == t and site == x)
        return evs, sts


def _check_run_inputs(scenario: LatticeScenario, strategy: Strategy, pattern) -> None:
    if pattern not in scenario.patterns:
        raise InputError(f"pattern {pattern!r} is not admissible for this scenario")
    if set(strategy.agents) != set(scenario.agents):
        raise InputError("strategy agents do not match the scenario's agent sites")
    for site, tr in strategy.agents.items():
        if tr.n_symbols != scenario.n_symbols:
            raise InputError(f"transducer at x={site} uses {tr.n_symbols} symbols, "
                             f"scenario alphabet has {scenario.n_symbols}")
        if tr.ports != scenario.agents[site].ports:
            raise InputError(f"transducer at x={site} has the wrong ports")


def run(scenario: LatticeScenario, strategy: Strategy, pattern) -> Transcript:
    _check_run_inputs(scenario, strategy, pattern)
    return _simulate(scenario, strategy.agents, scenario.inputs[pattern], pattern)


def _simulate(scenario: LatticeScenario, agents: Mapping[int, Transducer], injections, pattern) -> Transcript:
    lo, hi = scenario.x_min, scenario.x_max
    sinks = scenario.sinks
    names = (None,) + scenario.alphabet
    by_time: dict[int, list[Injection]] = {}
    for inj in injections:
        by_time.setdefault(inj.t, []).append(inj)

    state = {site: tr.initial for site, tr in agents.items()}
    events: list[Event] = []
    states = []
    flight: list[tuple[int, str, int, int, int | None]] = []  # x, heading, code, msg, origin
    next_msg = 0

    def launch(t, x, heading, code, origin):
        nonlocal next_msg
        events.append(Event(t, x, "emit", names[code], heading, next_msg, origin))
        nx = x + 1 if heading == RIGHT else x - 1
        if lo <= nx <= hi:
            new_flight.append((nx, heading, code, next_msg, origin))
        next_msg += 1

    for t in range(scenario.t_max + 1):
        from_left: dict[int, int] = {}
        from_right: dict[int, int] = {}
        new_flight: list = []
        for x, heading, code, msg, origin in flight:
            if x in sinks:
                events.append(Event(t, x, "deliver", names[code], heading, msg, origin))
                continue
            events.append(Event(t, x, "move", names[code], heading, msg, origin))
            if x in agents:
                (from_left if heading == RIGHT else from_right)[x] = code
            else:
                nx = x + 1 if heading == RIGHT else x - 1
                if lo <= nx <= hi:
                    new_flight.append((nx, heading, code, msg, origin))

        ext = {}
        for inj in by_time.get(t, ()):
            if inj.heading == EXTERNAL:
                ext[inj.x] = scenario.encode(inj.symbol)

        for site, tr in agents.items():
            s = state[site]
            states.append((t, site, s))
            nxt, out_l, out_r, out_e = tr.step(s, from_left.get(site, SILENT),
                                               from_right.get(site, SILENT), ext.get(site, SILENT))
            state[site] = nxt
            if out_l:
                launch(t, site, LEFT, out_l, site)
            if out_r:
                launch(t, site, RIGHT, out_r, site)
            if out_e:
                events.append(Event(t, site, "output", names[out_e], EXTERNAL, -1, site))

        for inj in by_time.get(t, ()):
            if inj.heading != EXTERNAL:
                launch(t, inj.x, inj.heading, scenario.encode(inj.symbol), None)

        flight = new_flight

    events.sort(key=Event.sort_key)
    return Transcript(pattern, tuple(events), tuple(states))


@dataclass(frozen=True)
class Verdict:
    success: bool
    failures: Mapping[object, tuple[str, ...]] = field(default_factory=dict)


def guaranteed_success(scenario: LatticeScenario, strategy: Strategy) -> Verdict:
    failures = {}
    for p in scenario.patterns:
        problems = scenario.task.violations(p, run(scenario, strategy, p).deliveries)
        if problems:
            failures[p] = tuple(problems)
    return Verdict(not failures, failures)


# ----------------------------------------------------------------- built-in worlds


def _extent(window, lo: int, hi: int, horizon: int) -> tuple[int, int, int]:
    """Lattice bounds, defaulting to the tight box; an explicit window must contain it."""
    if window is None:
        return lo, hi, horizon
    if window.x_min > lo or window.x_max < hi or window.t_max < horizon:
        raise InputError(f"window must cover x in [{lo}, {hi}] and t up to {horizon}")
    return window.x_min, window.x_max, window.t_max


def refined_scenario(task: RefinedBitTask, patterns=(), window=None) -> LatticeScenario:
    b0, a0, a1, b1 = task.layout
    x_min, x_max, t_max = _extent(window, b0, b1, task.deadline)
    inputs = {p: (Injection(0, b0, str(p[0]), RIGHT), Injection(0, b1, str(p[1]), LEFT))
              for p in [(0, 1), (1, 0), (1, 1)]}
    return LatticeScenario(
        x_min=x_min, x_max=x_max, t_max=t_max,
        agents={a0: Agent("A0", Ports(in_left=True, out_left=True)),
                a1: Agent("A1", Ports(in_right=True, out_right=True))},
        sinks={b0: "B0", b1: "B1"},
        alphabet=("0", "1"),
        inputs=inputs,
        task=task,
        patterns=tuple(patterns),
    )


def original_scenario(task: OriginalSignalTask, relay_site: int | None = None,
                      window=None) -> LatticeScenario:
    relay = task.D // 2 if relay_site is None else relay_site
    _check_relay_site(task, relay)
    x_min, x_max, t_max = _extent(window, task.L, task.R, task.T)
    inputs = {}
    for p in task.admissible_patterns():
        inputs[p] = tuple(Injection(0, task.L if req == 1 else task.R, "1", EXTERNAL) for req in sorted(p))
    return LatticeScenario(
        x_min=x_min, x_max=x_max, t_max=t_max,
        agents={task.L: Agent("L", Ports(ext_in=True, out_right=True)),
                relay: Agent("C", Ports(in_left=True, in_right=True, out_left=True, out_right=True)),
                task.R: Agent("R", Ports(ext_in=True, out_left=True))},
        sinks={task.L: "L", task.R: "R"},
        alphabet=("1",),
        inputs=inputs,
        task=task,
    )


def _check_relay_site(task: OriginalSignalTask, relay_site: int) -> None:
    if isinstance(relay_site, bool) or not isinstance(relay_site, int) or not 0 < relay_site < task.D:
        raise InputError(f"relay site must lie strictly between 0 and {task.D}, got {relay_site!r}")


def make_relay_strategy(task: OriginalSignalTask, relay_site: int) -> Strategy:
    """Endpoints fire on request; the relay forwards the first signal it sees and eats the rest.

    On a tie the signal coming from L wins.
    """
    _check_relay_site(task, relay_site)
    n_sym = 2

    def endpoint(heading):
        def fn(state, in_l, in_r, ext):
            return (0, ext, SILENT, SILENT) if heading == LEFT else (0, SILENT, ext, SILENT)
        return fn

    def relay(state, in_l, in_r, ext):
        if state == 1:
            return 1, SILENT, SILENT, SILENT
        if in_l:
            return 1, SILENT, in_l, SILENT
        if in_r:
            return 1, in_r, SILENT, SILENT
        return 0, SILENT, SILENT, SILENT

    return Strategy({
        task.L: Transducer.from_function(1, n_sym, Ports(ext_in=True, out_right=True), endpoint(RIGHT)),
        relay_site: Transducer.from_function(
            2, n_sym, Ports(in_left=True, in_right=True, out_left=True, out_right=True), relay),
        task.R: Transducer.from_function(1, n_sym, Ports(ext_in=True, out_left=True), endpoint(LEFT)),
    }, name="relay")


def make_echo_strategy(task: RefinedBitTask) -> Strategy:
    """Each A_i returns the bit it was sent, straight back to its own B_i."""
    a0, a1 = task.a_sites
    return Strategy({
        a0: Transducer.from_function(1, 3, Ports(in_left=True, out_left=True),
                                     lambda s, l, r, e: (0, l, SILENT, SILENT)),
        a1: Transducer.from_function(1, 3, Ports(in_right=True, out_right=True),
                                     lambda s, l, r, e: (0, SILENT, r, SILENT)),
    }, name="echo")


def absorb_strategy(scenario: LatticeScenario) -> Strategy:
    return Strategy({site: Transducer.null(a.ports, scenario.n_symbols)
                     for site, a in scenario.agents.items()}, name="absorb")
