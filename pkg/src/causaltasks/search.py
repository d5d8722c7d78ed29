"""Exhaustive strategy enumeration and feasibility decisions.

Strategies are enumerated in a fixed canonical order: per agent, all
transducers with 1 state, then 2 states, and so on, each block
lexicographic over its transition table; jointly, the agent at the lowest
site is the most significant digit.

When every pair of agents is further apart than the horizon, no agent can
hear from another before the run ends.  The joint run then splits exactly
into one local run per agent (the other agents replaced by silent
absorbers) plus Bob's own traffic, so each agent's transducers can be
grouped by the deliveries they cause and the joint space is decided over
those groups.  Each joint strategy still gets its own verdict; the split
only avoids recomputing identical local behaviour.
"""

from __future__ import annotations

import itertools
import time
from collections.abc import Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .errors import InputError, ResourceLimitError
from .lattice import (LatticeScenario, Ports, SILENT, Strategy, Transducer,
                      _simulate, guaranteed_success, make_echo_strategy, refined_scenario, run)
from .tasks import Delivery, Promise, RefinedBitTask
from .geometry import Point

MAX_AGENT_TABLES = 2_000_000
MAX_CLASS_COMBOS = 1_000_000


@dataclass(frozen=True)
class SearchBounds:
    states: int = 1
    alphabet: int = 2  # counts silence
    budget: float | None = None  # wall-clock seconds
    max_agent_tables: int = MAX_AGENT_TABLES

    def __post_init__(self):
        if self.states < 1:
            raise InputError("states must be ≥ 1")
        if self.alphabet < 2:
            raise InputError("alphabet must be ≥ 2 (one symbol plus silence)")


class TransducerSpace(Sequence):
    """All transducers for one agent with at most ``max_states`` states."""

    def __init__(self, ports: Ports, max_states: int, n_symbols: int):
        self.ports = ports
        self.max_states = max_states
        self.n_symbols = n_symbols
        self._blocks = []
        for s in range(1, max_states + 1):
            n_dom = s * n_symbols ** ports.n_in
            n_cod = s * n_symbols ** ports.n_out
            self._blocks.append((s, n_dom, n_cod, n_cod ** n_dom))

    def __len__(self) -> int:
        return sum(b[3] for b in self._blocks)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        if i < 0:
            i += len(self)
        for s, n_dom, n_cod, count in self._blocks:
            if i < count:
                digits = []
                for _ in range(n_dom):
                    i, d = divmod(i, n_cod)
                    digits.append(d)
                return Transducer(s, self.n_symbols, self.ports, tuple(reversed(digits)))
            i -= count
        raise IndexError("transducer index out of range")


class ProductSpace(Sequence):
    """Joint strategies: one choice per agent site, lowest site most significant."""

    def __init__(self, sites: Sequence[int], per_agent: Sequence[Sequence[Transducer]], names=None):
        self.sites = tuple(sites)
        self.per_agent = list(per_agent)
        self.names = names or {}

    def __len__(self) -> int:
        n = 1
        for sp in self.per_agent:
            n *= len(sp)
        return n

    def digits(self, i: int) -> tuple[int, ...]:
        if not 0 <= i < len(self):
            raise IndexError("strategy index out of range")
        out = []
        for sp in reversed(self.per_agent):
            i, d = divmod(i, len(sp))
            out.append(d)
        return tuple(reversed(out))

    def index(self, digits: Sequence[int]) -> int:
        i = 0
        for sp, d in zip(self.per_agent, digits):
            i = i * len(sp) + d
        return i

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        if i < 0:
            i += len(self)
        ds = self.digits(i)
        strat = Strategy({site: sp[d] for site, sp, d in zip(self.sites, self.per_agent, ds)})
        name = self.names.get(ds)
        return Strategy(strat.agents, name=name) if name else strat


def enumerate_strategies(scenario: LatticeScenario, bounds: SearchBounds) -> ProductSpace:
    if bounds.alphabet != scenario.n_symbols:
        raise InputError(f"bounds alphabet {bounds.alphabet} does not match the scenario's "
                         f"{scenario.n_symbols} symbols (silence included)")
    per_agent = []
    for site, agent in scenario.agents.items():
        space = TransducerSpace(agent.ports, bounds.states, scenario.n_symbols)
        if len(space) > bounds.max_agent_tables:
            raise ResourceLimitError(
                f"agent {agent.label} at x={site} has too many transducers for the cap "
                f"{bounds.max_agent_tables}", len(space))
        per_agent.append(space)
    return ProductSpace(list(scenario.agents), per_agent)


def local_response_space(scenario: LatticeScenario) -> ProductSpace:
    """Each agent answers its own B with a fixed function of the bit it got.

    Silence maps to silence; the four maps {0,1}->{0,1} are ordered by
    ``(f(0), f(1))``, so the identity is index 1 per agent.
    """
    if scenario.alphabet != ("0", "1"):
        raise InputError("local-response strategies need the bit alphabet ('0', '1')")
    per_agent = []
    for site, agent in scenario.agents.items():
        p = agent.ports
        if p.n_in != 1 or p.n_out != 1:
            raise InputError(f"agent {agent.label} needs exactly one inbound and one outbound track")
        maps = []
        for f0, f1 in itertools.product((0, 1), repeat=2):
            def fn(state, in_l, in_r, ext, f=(f0, f1)):
                got = in_l or in_r or ext
                reply = SILENT if got == SILENT else f[got - 1] + 1
                return (0, reply, reply, reply)
            maps.append(Transducer.from_function(1, 3, p, fn))
        per_agent.append(maps)
    n = len(per_agent)
    return ProductSpace(list(scenario.agents), per_agent, names={(1,) * n: "echo"})


# ------------------------------------------------------------------------ results


@dataclass(frozen=True)
class Feasible:
    witness: Strategy
    index: int
    explored: int
    verdict = "feasible"


@dataclass(frozen=True)
class Infeasible:
    certificates: Mapping  # strategy index -> one failing pattern
    verdict = "infeasible"

    @property
    def explored(self) -> int:
        return len(self.certificates)


@dataclass(frozen=True)
class Exhausted:
    budget: float
    explored: int
    verdict = "exhausted"


FeasibilityResult = Feasible | Infeasible | Exhausted


def decide_feasible(scenario: LatticeScenario, bounds: SearchBounds | None = None, *,
                    space: ProductSpace | None = None, workers: int = 1) -> FeasibilityResult:
    """First canonical strategy that always succeeds, or a failing pattern for every strategy."""
    if not scenario.patterns:
        raise InputError("scenario has no admissible patterns; refusing a vacuous task")
    bounds = bounds or SearchBounds(alphabet=scenario.n_symbols)
    if space is None:
        space = enumerate_strategies(scenario, bounds)
    deadline = None if bounds.budget is None else time.time() + bounds.budget
    if scenario.isolated() and space.sites:
        return _decide_factored(scenario, space, workers, deadline, bounds.budget)
    return _decide_brute(scenario, space, workers, deadline, bounds.budget)


def _chunks(n: int, workers: int) -> list[tuple[int, int]]:
    size = max(1, -(-n // max(1, workers * 4)))
    return [(a, min(n, a + size)) for a in range(0, n, size)]


def _map(fn, jobs, workers):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, *zip(*jobs)))


def _brute_chunk(scenario, space, start, stop, deadline):
    certs = {}
    for i in range(start, stop):
        if deadline is not None and time.time() > deadline:
            return None, certs, True
        verdict = guaranteed_success(scenario, space[i])
        if verdict.success:
            return i, certs, False
        certs[i] = next(p for p in scenario.patterns if p in verdict.failures)
    return None, certs, False


def _decide_brute(scenario, space, workers, deadline, budget):
    jobs = [(scenario, space, a, b, deadline) for a, b in _chunks(len(space), workers)]
    certs = {}
    for witness, chunk_certs, timed_out in _map(_brute_chunk, jobs, workers):
        certs.update(chunk_certs)
        if witness is not None:
            return Feasible(space[witness], witness, len(certs) + 1)
        if timed_out:
            return Exhausted(budget, len(certs))
    return Infeasible(certs)


# ------------------------------------------------------------------ factored path


def _reaches(inj, site: int, t_max: int) -> bool:
    return abs(inj.x - site) <= t_max - inj.t


def _local_deliveries(scenario, agents, injections, origin):
    tr = _simulate(scenario, agents, injections, None)
    return tuple((e.t, e.x, e.symbol) for e in tr.events if e.kind == "deliver" and e.origin == origin)


def _signature_chunk(scenario, site, agent_space, start, stop, deadline):
    """Deliveries each transducer causes from ``site``, for every pattern."""
    nulls = {s: Transducer.null(a.ports, scenario.n_symbols) for s, a in scenario.agents.items()}
    relevant = {p: tuple(i for i in scenario.inputs[p] if _reaches(i, site, scenario.t_max))
                for p in scenario.patterns}
    distinct = list(dict.fromkeys(relevant.values()))
    sigs = []
    for k in range(start, stop):
        if deadline is not None and time.time() > deadline:
            return sigs, True
        agents = dict(nulls)
        agents[site] = agent_space[k]
        local = {inj: _local_deliveries(scenario, agents, inj, site) for inj in distinct}
        sigs.append(tuple(local[relevant[p]] for p in scenario.patterns))
    return sigs, False


class FactoredCertificates(Mapping):
    """Failing pattern for every joint strategy, computed on demand from agent classes."""

    def __init__(self, space: ProductSpace, class_of: list[list[int]], combo_fail: dict):
        self._space = space
        self._class_of = class_of
        self._combo_fail = combo_fail

    def __len__(self) -> int:
        return len(self._space)

    def __iter__(self):
        return iter(range(len(self._space)))

    def __getitem__(self, i):
        if not isinstance(i, int) or not 0 <= i < len(self._space):
            raise KeyError(i)
        combo = tuple(cls[d] for cls, d in zip(self._class_of, self._space.digits(i)))
        return self._combo_fail[combo]


def _decide_factored(scenario, space, workers, deadline, budget):
    nulls = {s: Transducer.null(a.ports, scenario.n_symbols) for s, a in scenario.agents.items()}
    env = {}
    for p in scenario.patterns:
        env[p] = _local_deliveries(scenario, nulls, scenario.inputs[p], None)

    class_of, reps, sig_tables = [], [], []
    explored = 0
    for site, agent_space in zip(space.sites, space.per_agent):
        jobs = [(scenario, site, agent_space, a, b, deadline) for a, b in _chunks(len(agent_space), workers)]
        sigs = []
        for chunk_sigs, timed_out in _map(_signature_chunk, jobs, workers):
            sigs.extend(chunk_sigs)
            if timed_out:
                return Exhausted(budget, explored + len(sigs))
        explored += len(sigs)
        ids: dict = {}
        first: list[int] = []
        cls = []
        for k, sig in enumerate(sigs):
            if sig not in ids:
                ids[sig] = len(first)
                first.append(k)
            cls.append(ids[sig])
        class_of.append(cls)
        reps.append(first)
        sig_tables.append(list(ids))

    n_combos = 1
    for r in reps:
        n_combos *= len(r)
    if n_combos > MAX_CLASS_COMBOS:
        raise ResourceLimitError("too many behaviour-class combinations", n_combos)

    combo_fail = {}
    best = None
    for combo in itertools.product(*(range(len(r)) for r in reps)):
        failing = None
        for j, p in enumerate(scenario.patterns):
            found = list(env[p])
            for a, c in enumerate(combo):
                found.extend(sig_tables[a][c][j])
            deliveries = [Delivery(Point(t, (x,)), sym) for t, x, sym in found]
            if scenario.task.violations(p, deliveries):
                failing = p
                break
        if failing is None:
            digits = tuple(reps[a][c] for a, c in enumerate(combo))
            if best is None or digits < best:
                best = digits
        combo_fail[combo] = failing
    if best is not None:
        idx = space.index(best)
        return Feasible(space[idx], idx, len(space))
    return Infeasible(FactoredCertificates(space, class_of, combo_fail))


# ------------------------------------------------------------------ refined task


def refined_local_search(promise: Promise, D: int = 8, eps: int = 1) -> set:
    """Winning pairs of local response maps, each map written ``(f(0), f(1))``.

    Evaluated directly against the task predicate, without the lattice.
    """
    task = RefinedBitTask(D, eps, promise)
    b0, _, _, b1 = task.layout
    maps = list(itertools.product((0, 1), repeat=2))
    winners = set()
    for f0, f1 in itertools.product(maps, repeat=2):
        ok = True
        for bits in task.admissible_patterns():
            out = [Delivery(Point(task.deadline, (b0,)), str(f0[bits[0]])),
                   Delivery(Point(task.deadline, (b1,)), str(f1[bits[1]]))]
            if task.violations(bits, out):
                ok = False
                break
        if ok:
            winners.add((f0, f1))
    return winners


ECHO_MAPS = ((0, 1), (0, 1))


def is_echo(task: RefinedBitTask, strategy: Strategy) -> bool:
    """Behavioural check: does ``strategy`` act like echo on every input bit?"""
    sc = refined_scenario(task)
    echo = make_echo_strategy(task)
    return all(run(sc, strategy, p).deliveries == run(sc, echo, p).deliveries for p in sc.patterns)
