"""Body parts, positions, actions and chains.

An action is a plain tuple of six integer positions (-1, 0, +1) indexed by
``BodyPart``; a chain is a non-empty tuple of actions. Both are hashable, so
structural equality and set-based diversity counts come for free.
"""

from __future__ import annotations

import itertools
from enum import IntEnum
from typing import Optional, Tuple


class BodyPart(IntEnum):
    LEFT_ARM = 0
    RIGHT_ARM = 1
    LEFT_LEG = 2
    RIGHT_LEG = 3
    HEAD = 4
    HIPS = 5


class Position(IntEnum):
    DOWN = -1
    NEUTRAL = 0
    UP = 1


Action = Tuple[int, ...]
Chain = Tuple[Action, ...]

N_PARTS = len(BodyPart)
ARMS = (BodyPart.LEFT_ARM, BodyPart.RIGHT_ARM)
LEGS = (BodyPart.LEFT_LEG, BodyPart.RIGHT_LEG)

_COUNTERPART = {
    BodyPart.LEFT_ARM: BodyPart.RIGHT_ARM,
    BodyPart.RIGHT_ARM: BodyPart.LEFT_ARM,
    BodyPart.LEFT_LEG: BodyPart.RIGHT_LEG,
    BodyPart.RIGHT_LEG: BodyPart.LEFT_LEG,
}

# index -> counterpart index, or -1 for unpaired parts; used on hot paths
COUNTERPART_INDEX = tuple(int(_COUNTERPART.get(p, -1)) for p in BodyPart)

_CODE = {Position.DOWN: "D", Position.NEUTRAL: "N", Position.UP: "U"}
_DECODE = {v: int(k) for k, v in _CODE.items()}


def counterpart(part: BodyPart) -> Optional[BodyPart]:
    """Symmetric partner of a limb, or None for the head and hips."""
    return _COUNTERPART.get(BodyPart(part))


def neutral_action() -> Action:
    return (0,) * N_PARTS


def is_active(position: int) -> bool:
    return position != Position.NEUTRAL


def active_count(action: Action) -> int:
    return sum(1 for p in action if p != 0)


def enumerate_actions() -> list[Action]:
    """All 729 actions, lexicographic over the parts with DOWN < NEUTRAL < UP."""
    return list(itertools.product((-1, 0, 1), repeat=N_PARTS))


def make_action(positions) -> Action:
    action = tuple(int(Position(p)) for p in positions)
    if len(action) != N_PARTS:
        raise ValueError(f"an action has exactly {N_PARTS} positions, got {len(action)}")
    return action


def make_chain(steps) -> Chain:
    chain = tuple(make_action(s) for s in steps)
    if not chain:
        raise ValueError("a chain needs at least one step")
    return chain


def encode_action(action: Action) -> str:
    """Six-letter text form, e.g. ``"UUNNND"``."""
    return "".join(_CODE[Position(p)] for p in action)


def decode_action(text: str) -> Action:
    if len(text) != N_PARTS or any(ch not in _DECODE for ch in text):
        raise ValueError(f"not an action encoding: {text!r}")
    return tuple(_DECODE[ch] for ch in text)


def encode_chain(chain: Chain) -> str:
    return "|".join(encode_action(a) for a in chain)


def decode_chain(text: str) -> Chain:
    return make_chain(decode_action(t) for t in text.split("|"))
