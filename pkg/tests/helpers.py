"""Random worlds and a do-nothing task for property tests."""

from __future__ import annotations

import random

from causaltasks.lattice import (EXTERNAL, LEFT, RIGHT, Agent, Injection, LatticeScenario,
                                 Ports, Strategy, Transducer)


class AnythingGoes:
    """A task whose success predicate accepts every transcript."""

    def __init__(self, patterns=("p",)):
        self._patterns = list(patterns)

    def admissible_patterns(self):
        return list(self._patterns)

    def violations(self, pattern, deliveries):
        return []


def random_ports(rng: random.Random) -> Ports:
    return Ports(*(rng.random() < 0.6 for _ in range(6)))


def random_transducer(rng: random.Random, ports: Ports, n_symbols: int, max_states: int = 3) -> Transducer:
    s = rng.randint(1, max_states)
    n_dom = s * n_symbols ** ports.n_in
    n_cod = s * n_symbols ** ports.n_out
    return Transducer(s, n_symbols, ports, tuple(rng.randrange(n_cod) for _ in range(n_dom)))


def random_world(rng: random.Random, width: int = 12, t_max: int = 12):
    """A random scenario with one pattern ``"p"`` plus a random strategy for it."""
    sites = list(range(width + 1))
    rng.shuffle(sites)
    n_agents = rng.randint(1, 4)
    agent_sites = sites[:n_agents]
    sink_sites = sites[n_agents:n_agents + rng.randint(1, 3)]
    alphabet = tuple("abc"[: rng.randint(1, 3)])
    agents = {x: Agent(f"A{x}", random_ports(rng)) for x in agent_sites}
    injections = random_injections(rng, agents, sink_sites, alphabet, t_max)
    sc = LatticeScenario(0, width, t_max, agents, {x: f"B{x}" for x in sink_sites}, alphabet,
                         {"p": injections}, AnythingGoes())
    strat = Strategy({x: random_transducer(rng, a.ports, sc.n_symbols) for x, a in agents.items()})
    return sc, strat


def random_injections(rng, agents, sink_sites, alphabet, t_max, count=None):
    out, used = [], set()
    for _ in range(rng.randint(1, 8) if count is None else count):
        inj = random_injection(rng, agents, sink_sites, alphabet, t_max)
        if inj is not None and (inj.t, inj.x, inj.heading) not in used:
            used.add((inj.t, inj.x, inj.heading))
            out.append(inj)
    return tuple(out)


def random_injection(rng, agents, sink_sites, alphabet, t_max):
    ext_sites = [x for x, a in agents.items() if a.ports.ext_in]
    free_sinks = [x for x in sink_sites if x not in agents]
    options = []
    if ext_sites:
        options.append(EXTERNAL)
    if free_sinks:
        options.append("launch")
    if not options:
        return None
    kind = rng.choice(options)
    t = rng.randint(0, t_max)
    sym = rng.choice(alphabet)
    if kind == EXTERNAL:
        return Injection(t, rng.choice(ext_sites), sym, EXTERNAL)
    return Injection(t, rng.choice(free_sinks), sym, rng.choice((LEFT, RIGHT)))
