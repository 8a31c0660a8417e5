"""Agent behaviour: trend detection, invention, imitation, adoption and
self-regulated invention probability.

Randomness always comes from an explicitly passed ``random.Random``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

from .fitness import OPTIMA, SINGLE_TABLE, TERMS_TABLE, FitnessTerms, chain_fitness, chain_terms, discount_factor
from .model import ARMS, COUNTERPART_INDEX, LEGS, N_PARTS, Action, BodyPart, Chain, neutral_action
from .params import SimParams

MAX_EXTENSION_TRIES = 100
_PERMS4 = list(itertools.permutations(range(4)))


@dataclass(frozen=True)
class TrendDetector:
    """Learned biases toward more movement and toward symmetric limbs."""

    beta_move: float = 0.0
    beta_sym: float = 0.0


@dataclass(frozen=True)
class HiddenActivations:
    movement: float
    symmetry: float
    opposite: float
    left: int
    right: int
    arm: int
    leg: int


class Implemented(NamedTuple):
    """A chain with its cached evaluation, as seen by neighbours."""

    chain: Chain
    fitness: float
    prefix: float  # per-step fitness of chain[:-1]
    terms: FitnessTerms  # terms summed over all steps


def implement(chain: Chain, params: SimParams) -> Implemented:
    return Implemented(
        chain,
        chain_fitness(chain, params.fitness_head_rule, params.chain_discount_rule),
        chain_fitness(chain[:-1], params.fitness_head_rule) if len(chain) > 1 else 0.0,
        chain_terms(chain),
    )


@dataclass
class AgentState:
    current: Implemented
    p_create: float = 0.5
    detector: TrendDetector = field(default_factory=TrendDetector)

    @property
    def chain(self) -> Chain:
        return self.current.chain

    @property
    def fitness(self) -> float:
        return self.current.fitness

    @classmethod
    def initial(cls, params: SimParams) -> "AgentState":
        return cls(implement((neutral_action(),), params), p_create=params.p_create_init)

    @classmethod
    def with_chain(cls, chain: Chain, params: SimParams, **kwargs) -> "AgentState":
        return cls(implement(chain, params), **kwargs)


@dataclass(frozen=True)
class AdoptionOutcome:
    adopted: bool
    old_terms: Optional[FitnessTerms] = None
    new_terms: Optional[FitnessTerms] = None


def hidden_activations(action: Action) -> HiddenActivations:
    def pair_match(pair, same):
        a, b = action[pair[0]], action[pair[1]]
        if a == 0 or b == 0:
            return 0
        return int((a == b) == same)

    active = [p != 0 for p in action]
    return HiddenActivations(
        movement=sum(active) / N_PARTS,
        symmetry=(pair_match(ARMS, True) + pair_match(LEGS, True)) / 2,
        opposite=(pair_match(ARMS, False) + pair_match(LEGS, False)) / 2,
        left=int(active[BodyPart.LEFT_ARM] or active[BodyPart.LEFT_LEG]),
        right=int(active[BodyPart.RIGHT_ARM] or active[BodyPart.RIGHT_LEG]),
        arm=int(active[BodyPart.LEFT_ARM] or active[BodyPart.RIGHT_ARM]),
        leg=int(active[BodyPart.LEFT_LEG] or active[BodyPart.RIGHT_LEG]),
    )


def _new_position(part: int, source: Action, detector: TrendDetector, rng: random.Random) -> int:
    """Pick one of the two positions a part can move to, per the learned biases."""
    current = source[part]
    if current != 0:
        # alternatives: neutral, or the opposite active position
        if rng.random() < (1.0 + detector.beta_move) / 2.0:
            return -current
        return 0
    partner = COUNTERPART_INDEX[part]
    if partner >= 0 and source[partner] != 0:
        if rng.random() < (1.0 + detector.beta_sym) / 2.0:
            return source[partner]
        return -source[partner]
    return 1 if rng.random() < 0.5 else -1


def mutate_action(action: Action, p_change: float, detector: TrendDetector, rng: random.Random) -> Action:
    out = list(action)
    for part in range(N_PARTS):
        if rng.random() < p_change:
            out[part] = _new_position(part, action, detector, rng)
    return tuple(out)


def can_extend(chain: Chain, head_rule: str = "prose") -> bool:
    last = chain[-1]
    return last in OPTIMA[head_rule] and (len(chain) == 1 or last != chain[-2])


def invent(state: AgentState, params: SimParams, rng: random.Random) -> Chain:
    """Propose a new chain; adoption is decided separately by ``try_adopt``."""
    chain = state.chain
    last = chain[-1]
    if params.chaining_enabled and can_extend(chain, params.fitness_head_rule):
        for _ in range(MAX_EXTENSION_TRIES):
            step = mutate_action(last, params.p_change, state.detector, rng)
            if step != last:
                break
        else:
            part = int(rng.random() * N_PARTS)
            forced = list(last)
            forced[part] = _new_position(part, last, state.detector, rng)
            step = tuple(forced)
        return chain + (step,)

    step = mutate_action(last, params.p_change, state.detector, rng)
    if len(chain) > 1 and step == chain[-2]:
        # would create two equal consecutive steps
        return chain
    return chain[:-1] + (step,)


def imitate(
    state: AgentState,
    neighbor_chains: Sequence[tuple[Chain, float]],
    rng: random.Random,
) -> Optional[Chain]:
    """Lazy search: first neighbour (random order) with a strictly fitter chain.

    ``neighbor_chains`` holds ``(chain, fitness, ...)`` entries snapshotted at
    the start of the iteration.
    """
    found = imitation_choice(state.fitness, neighbor_chains, rng)
    return None if found is None else found[0]


def imitation_choice(fitness: float, neighbor_chains: Sequence, rng: random.Random):
    """Like ``imitate`` but returns the whole snapshot entry."""
    n = len(neighbor_chains)
    if n == 4:
        order = _PERMS4[int(rng.random() * 24)]
    else:
        order = list(range(n))
        rng.shuffle(order)
    for i in order:
        if neighbor_chains[i][1] > fitness:
            return neighbor_chains[i]
    return None


def evaluate_candidate(state: AgentState, candidate: Chain, params: SimParams) -> Implemented:
    """Evaluate a proposal, reusing the current chain's cached evaluation."""
    cur = state.current
    chain = cur.chain
    if params.chain_discount_rule == "per_step":
        table = SINGLE_TABLE[params.fitness_head_rule]
        n = len(chain)
        last = candidate[-1]
        # left-to-right accumulation, so results equal chain_fitness exactly
        if len(candidate) == n + 1 and candidate[:-1] == chain:
            return Implemented(
                candidate,
                cur.fitness + table[last] * discount_factor(n),
                cur.fitness,
                cur.terms + TERMS_TABLE[last],
            )
        if len(candidate) == n and candidate[:-1] == chain[:-1]:
            return Implemented(
                candidate,
                cur.prefix + table[last] * discount_factor(n - 1),
                cur.prefix,
                cur.terms - TERMS_TABLE[chain[-1]] + TERMS_TABLE[last],
            )
    return implement(candidate, params)


def candidate_fitness(state: AgentState, candidate: Chain, params: SimParams) -> float:
    return evaluate_candidate(state, candidate, params).fitness


def adopt(state: AgentState, entry: Implemented) -> AdoptionOutcome:
    """Switch to ``entry`` if strictly fitter."""
    if not entry.fitness > state.current.fitness:
        return AdoptionOutcome(False)
    old_terms = state.current.terms
    state.current = entry
    return AdoptionOutcome(True, old_terms, entry.terms)


def try_adopt(state: AgentState, candidate: Chain, params: SimParams) -> AdoptionOutcome:
    """Implement ``candidate`` if it is strictly fitter than the current chain.

    On adoption the outcome carries chain-level terms (summed over steps) of
    the old and new chains, which drive ``update_biases``.
    """
    return adopt(state, evaluate_candidate(state, candidate, params))


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def _clamp(x: float, lo: float, hi: float) -> float:
    return lo if x < lo else hi if x > hi else x


def _step_bias(beta: float, delta: float) -> float:
    # rounding keeps repeated eta steps from stalling just short of a bound
    return _clamp(round(beta + delta, 12), -1.0, 1.0)


def update_biases(detector: TrendDetector, old: FitnessTerms, new: FitnessTerms, eta: float) -> TrendDetector:
    if new.m == old.m and new.symmetry == old.symmetry:
        return detector
    return TrendDetector(
        beta_move=_step_bias(detector.beta_move, eta * _sign(new.m - old.m)),
        beta_sym=_step_bias(detector.beta_sym, eta * _sign(new.symmetry - old.symmetry)),
    )


def relative_fitness(agent_fitness: float, mean_fitness: float) -> float:
    if mean_fitness == 0:
        return 1.0
    return agent_fitness / mean_fitness


def update_p_create(p_prev: float, rf_prev: float) -> float:
    return _clamp(p_prev * rf_prev, 0.0, 1.0)
