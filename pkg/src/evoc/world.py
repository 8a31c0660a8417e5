"""The lattice world and the synchronous per-iteration pipeline.

Agents live on a toroidal ``grid_width x grid_height`` lattice stored in
row-major order (index ``y * width + x``). Each iteration:

1. with self-regulation on, every agent rescales its invention probability
   by its fitness relative to the previous iteration's mean;
2. all implemented chains are snapshotted;
3. agents, in row-major order, invent (probability ``p_create``) or imitate
   the snapshot of their four neighbours, adopting strictly fitter chains
   (with chaining off, agents already holding an optimal action are skipped:
   nothing can improve on it);
4. metrics are recorded for the committed state.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, NamedTuple

from . import agent as ag
from .fitness import SINGLE_TABLE
from .metrics import IterationRecord, TimeSeries, make_record
from .params import SimParams


class Coord(NamedTuple):
    x: int
    y: int


def neighbors(c: Coord, params: SimParams) -> list[Coord]:
    """Von Neumann neighbours with wraparound, ordered N, E, S, W."""
    w, h = params.grid_width, params.grid_height
    x, y = c
    if not (0 <= x < w and 0 <= y < h):
        raise ValueError(f"{c} lies outside a {w}x{h} grid")
    return [
        Coord(x, (y - 1) % h),
        Coord((x + 1) % w, y),
        Coord(x, (y + 1) % h),
        Coord((x - 1) % w, y),
    ]


def neighbor_table(params: SimParams) -> list[tuple[int, ...]]:
    w = params.grid_width
    return [
        tuple(n.y * w + n.x for n in neighbors(Coord(i % w, i // w), params))
        for i in range(params.n_agents)
    ]


@dataclass
class RunState:
    agents: list[ag.AgentState]
    iteration: int
    rng: random.Random
    prev_mean_fitness: float
    neighbor_index: list[tuple[int, ...]]

    def record(self) -> IterationRecord:
        return make_record(
            self.iteration,
            [a.chain for a in self.agents],
            [a.fitness for a in self.agents],
            [a.p_create for a in self.agents],
        )


def init_run(params: SimParams) -> RunState:
    agents = [ag.AgentState.initial(params) for _ in range(params.n_agents)]
    return RunState(
        agents=agents,
        iteration=0,
        rng=random.Random(params.seed),
        prev_mean_fitness=agents[0].fitness,
        neighbor_index=neighbor_table(params),
    )


def step(state: RunState, params: SimParams) -> IterationRecord:
    agents = state.agents
    rng = state.rng

    if params.sr_enabled:
        mean = state.prev_mean_fitness
        for a in agents:
            a.p_create = ag.update_p_create(a.p_create, ag.relative_fitness(a.fitness, mean))

    snapshot = [a.current for a in agents]
    eta = params.eta
    random_ = rng.random
    invent, try_adopt, adopt, choose = ag.invent, ag.try_adopt, ag.adopt, ag.imitation_choice
    update_biases = ag.update_biases
    neighbor_index = state.neighbor_index
    # with chaining off an agent holding an optimal action can never change
    settled = None if params.chaining_enabled else max(SINGLE_TABLE[params.fitness_head_rule].values())
    for i, a in enumerate(agents):
        if a.current.fitness == settled:
            continue
        if random_() < a.p_create:
            candidate = invent(a, params, rng)
            if candidate is a.current.chain:
                continue
            outcome = try_adopt(a, candidate, params)
        else:
            found = choose(a.current.fitness, [snapshot[j] for j in neighbor_index[i]], rng)
            if found is None:
                continue
            outcome = adopt(a, found)
        if outcome.adopted:
            a.detector = update_biases(a.detector, outcome.old_terms, outcome.new_terms, eta)

    state.iteration += 1
    rec = state.record()
    state.prev_mean_fitness = rec.mean_fitness
    return rec


def iterate(params: SimParams) -> Iterator[tuple[RunState, IterationRecord]]:
    """Yield the state after initialisation and after each iteration."""
    state = init_run(params)
    yield state, state.record()
    for _ in range(params.iterations):
        rec = step(state, params)
        yield state, rec


def run(params: SimParams) -> TimeSeries:
    series = TimeSeries(params=params)
    state = None
    for state, rec in iterate(params):
        series.records.append(rec)
    series.final_p_create = [a.p_create for a in state.agents]
    return series
