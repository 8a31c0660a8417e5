"""Fitness of single actions and chained multi-step actions.

Single-step score::

    F = m + 1.5 * (s_a + s_t) + 2 * head_bonus

``m`` counts active parts (head included), ``s_a``/``s_t`` flag arms/legs that
are both active and in the same position. Under the default ``"prose"`` head
rule the bonus goes to a stationary head; ``"literal"`` gives it to a moving
head instead, which is kept only so the two readings can be compared.

Chained score: step ``k`` (1-based) is discounted by ``1.2 ** (k - 1)`` under
the default ``"per_step"`` rule; ``"literal"`` discounts every step by
``1.2 ** (n - 1)`` for a chain of length ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import ARMS, LEGS, Action, BodyPart, Chain, enumerate_actions

HEAD_RULES = ("prose", "literal")
DISCOUNT_RULES = ("per_step", "literal")
DISCOUNT = 1.2
SYMMETRY_WEIGHT = 1.5
HEAD_WEIGHT = 2.0


@dataclass(frozen=True)
class FitnessTerms:
    m: int
    s_a: int
    s_t: int
    head_stationary: int

    @property
    def symmetry(self) -> int:
        return self.s_a + self.s_t

    def __add__(self, other: "FitnessTerms") -> "FitnessTerms":
        # chain-level totals; m may then exceed 6
        return FitnessTerms(
            self.m + other.m,
            self.s_a + other.s_a,
            self.s_t + other.s_t,
            self.head_stationary + other.head_stationary,
        )

    def __sub__(self, other: "FitnessTerms") -> "FitnessTerms":
        return FitnessTerms(
            self.m - other.m,
            self.s_a - other.s_a,
            self.s_t - other.s_t,
            self.head_stationary - other.head_stationary,
        )


def _pair_symmetric(action: Action, pair) -> int:
    a, b = action[pair[0]], action[pair[1]]
    return int(a != 0 and a == b)


def fitness_terms(action: Action) -> FitnessTerms:
    return FitnessTerms(
        m=sum(1 for p in action if p != 0),
        s_a=_pair_symmetric(action, ARMS),
        s_t=_pair_symmetric(action, LEGS),
        head_stationary=int(action[BodyPart.HEAD] == 0),
    )


def chain_terms(chain: Chain) -> FitnessTerms:
    """Terms summed over every step of a chain."""
    total = FitnessTerms(0, 0, 0, 0)
    for step in chain:
        total = total + _TERMS[step]
    return total


def _score(terms: FitnessTerms, head_rule: str) -> float:
    if head_rule == "prose":
        bonus = terms.head_stationary
    elif head_rule == "literal":
        bonus = 1 - terms.head_stationary
    else:
        raise ValueError(f"unknown head rule {head_rule!r}")
    return terms.m + SYMMETRY_WEIGHT * (terms.s_a + terms.s_t) + HEAD_WEIGHT * bonus


def exhaustive_scores(head_rule: str = "prose") -> dict:
    """Score every action from scratch (no cached tables)."""
    return {a: _score(fitness_terms(a), head_rule) for a in enumerate_actions()}


_ALL_ACTIONS = enumerate_actions()
_TERMS = {a: fitness_terms(a) for a in _ALL_ACTIONS}
TERMS_TABLE = _TERMS
# lookup tables keyed by head rule; the simulation reads these directly
SINGLE_TABLE = {rule: exhaustive_scores(rule) for rule in HEAD_RULES}
_DISCOUNTS = [DISCOUNT**-k for k in range(512)]


def discount_factor(k: int) -> float:
    """Weight of the (k+1)-th step, i.e. ``1.2 ** -k``."""
    return _DISCOUNTS[k] if k < len(_DISCOUNTS) else DISCOUNT**-k


def single_fitness(action: Action, head_rule: str = "prose") -> float:
    try:
        return SINGLE_TABLE[head_rule][tuple(action)]
    except KeyError:
        if head_rule not in SINGLE_TABLE:
            raise ValueError(f"unknown head rule {head_rule!r}") from None
        raise ValueError(f"not a valid action: {action!r}") from None


def chain_fitness(chain: Chain, head_rule: str = "prose", discount_rule: str = "per_step") -> float:
    if len(chain) == 0:
        raise ValueError("cannot score an empty chain")
    table = SINGLE_TABLE[head_rule]
    if discount_rule == "per_step":
        total = 0.0
        for k, step in enumerate(chain):
            total += table[step] * discount_factor(k)
        return total
    if discount_rule == "literal":
        weight = discount_factor(len(chain) - 1)
        return sum(table[step] * weight for step in chain)
    raise ValueError(f"unknown discount rule {discount_rule!r}")


def oracle_max_and_argmax(head_rule: str = "prose", fresh: bool = False) -> tuple[float, frozenset]:
    """Exhaustive search over all 729 actions.

    ``fresh`` rescores everything instead of reading the cached table.
    """
    table = exhaustive_scores(head_rule) if fresh else SINGLE_TABLE[head_rule]
    best = max(table.values())
    return best, frozenset(a for a, f in table.items() if f == best)


OPTIMA = {rule: oracle_max_and_argmax(rule)[1] for rule in HEAD_RULES}
