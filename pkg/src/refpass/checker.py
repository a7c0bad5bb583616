"""Policy-satisfaction predicates and the correctness experiment."""

from __future__ import annotations

from typing import Callable

from .policy import Policy
from .rng import ChoiceSource

Generator = Callable[[Policy, ChoiceSource], str]


def satisfies_length(pw: str, policy: Policy) -> bool:
    return len(pw) == policy.length


def satisfies_bounds(pw: str, policy: Policy) -> bool:
    """Every character is in some set, and each set's count is within [min, max]."""
    owner = policy.set_index()
    counts = [0] * len(policy.sets)
    for c in pw:
        i = owner.get(c)
        if i is None:
            return False
        counts[i] += 1
    return all(s.min_occurs <= k <= s.max_occurs for s, k in zip(policy.sets, counts))


def satisfies(pw: str, policy: Policy) -> bool:
    return satisfies_length(pw, policy) and satisfies_bounds(pw, policy)


def correctness_experiment(policy: Policy, rpg: Generator, cs: ChoiceSource) -> bool:
    password = rpg(policy, cs)
    return satisfies_length(password, policy) and satisfies_bounds(password, policy)
