"""The reference password generator.

Generation has three phases: draw each set's minimum from that set, fill
up to the target length from the union of sets with budget left, then
shuffle. Every random decision goes through a ``ChoiceSource`` so the
whole procedure can be replayed or enumerated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial, prod
from typing import MutableSequence, TypeVar

from .policy import CharSetSpec, Policy
from .rng import ChoiceSource

T = TypeVar("T")


@dataclass
class SetBudget:
    spec: CharSetSpec
    remaining: int


@dataclass
class GenerationState:
    password: list[str] = field(default_factory=list)
    budgets: list[SetBudget] = field(default_factory=list)

    @classmethod
    def start(cls, policy: Policy) -> GenerationState:
        return cls([], [SetBudget(s, s.max_occurs) for s in policy.sets])


def generate_character(slot: SetBudget, cs: ChoiceSource) -> str:
    if slot.remaining <= 0:
        raise AssertionError(f"budget of set {slot.spec.name!r} already exhausted")
    index = cs.choose(slot.spec.size)
    slot.remaining -= 1
    return slot.spec.chars[index]


def _draw_from_union(state: GenerationState, cs: ChoiceSource) -> str:
    available = [slot for slot in state.budgets if slot.remaining > 0]
    total = sum(slot.spec.size for slot in available)
    index = cs.choose(total)
    for slot in available:
        if index < slot.spec.size:
            slot.remaining -= 1
            return slot.spec.chars[index]
        index -= slot.spec.size
    raise AssertionError("union index out of range")


def shuffle_in_place(items: MutableSequence[T], cs: ChoiceSource) -> None:
    """Fisher-Yates: for i from len-1 down to 1, swap items[i] with items[choose(i+1)]."""
    for i in range(len(items) - 1, 0, -1):
        j = cs.choose(i + 1)
        items[i], items[j] = items[j], items[i]


def permute(s, cs: ChoiceSource):
    """Return a shuffled copy of ``s`` (a string or a list)."""
    items = list(s)
    shuffle_in_place(items, cs)
    return "".join(items) if isinstance(s, str) else items


def generate(policy: Policy, cs: ChoiceSource) -> str:
    """Generate one password for an already validated policy."""
    state = GenerationState.start(policy)
    for slot in state.budgets:
        for _ in range(slot.spec.min_occurs):
            state.password.append(generate_character(slot, cs))
    while len(state.password) < policy.length:
        state.password.append(_draw_from_union(state, cs))
    shuffle_in_place(state.password, cs)
    return "".join(state.password)


def choice_count(policy: Policy) -> int:
    """Number of ``choose`` calls one ``generate`` run makes."""
    return policy.length + policy.length - 1


def branch_count(policy: Policy) -> int:
    """Number of distinct choice sequences (leaves) ``generate`` can follow.

    The minimum phase and the shuffle have fixed fan-outs; the fill phase
    fan-out depends on which budgets are still open, so it is counted by
    recursion over the remaining budgets.
    """
    sizes = [s.size for s in policy.sets]
    fixed = prod(s.size ** s.min_occurs for s in policy.sets) * factorial(policy.length)

    @lru_cache(maxsize=None)
    def fill(budgets: tuple[int, ...], left: int) -> int:
        if left == 0:
            return 1
        total = 0
        for i, b in enumerate(budgets):
            if b > 0:
                nxt = budgets[:i] + (b - 1,) + budgets[i + 1:]
                total += sizes[i] * fill(nxt, left - 1)
        return total

    start = tuple(s.max_occurs - s.min_occurs for s in policy.sets)
    return fixed * fill(start, policy.length - sum(s.min_occurs for s in policy.sets))
