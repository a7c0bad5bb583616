"""Ground truth for the generator: the satisfying set, its size, an exactly
uniform sampler over it, and exact output distributions of any procedure
that draws its randomness from a ChoiceSource.
"""

from __future__ import annotations

import itertools
from collections.abc import Hashable
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, prod
from typing import Callable, Iterator, Mapping

from . import generator
from .checker import satisfies_bounds, satisfies_length
from .policy import Policy
from .rng import ChoiceSource

MAX_DOMAIN = 10**7
MAX_BRANCHES = 10**7


class DomainTooLarge(RuntimeError):
    pass


@dataclass(frozen=True)
class ExactDistribution:
    entries: Mapping[Hashable, Fraction]

    def __getitem__(self, key) -> Fraction:
        return self.entries.get(key, Fraction(0))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def items(self):
        return self.entries.items()

    @property
    def support(self) -> frozenset:
        return frozenset(self.entries)

    def total(self) -> Fraction:
        return sum(self.entries.values(), Fraction(0))

    def to_json(self) -> dict:
        return {
            "dist": [
                {"pw": pw, "num": str(p.numerator), "den": str(p.denominator)}
                for pw, p in sorted(self.entries.items())
            ]
        }

    @classmethod
    def from_json(cls, data: dict) -> ExactDistribution:
        return cls({e["pw"]: Fraction(int(e["num"]), int(e["den"])) for e in data["dist"]})

    @classmethod
    def uniform(cls, items) -> ExactDistribution:
        items = list(items)
        p = Fraction(1, len(items))
        return cls({x: p for x in items})


@dataclass(frozen=True)
class SatisfyingSet:
    passwords: tuple[str, ...]

    @property
    def count(self) -> int:
        return len(self.passwords)


def enumerate_satisfying(policy: Policy, limit: int = MAX_DOMAIN) -> SatisfyingSet:
    """Brute force over every length-L string on the policy alphabet."""
    alphabet = policy.alphabet
    if len(alphabet) ** policy.length > limit:
        raise DomainTooLarge(f"{len(alphabet)}^{policy.length} candidate strings exceeds {limit}")
    found = []
    for chars in itertools.product(alphabet, repeat=policy.length):
        pw = "".join(chars)
        if satisfies_length(pw, policy) and satisfies_bounds(pw, policy):
            found.append(pw)
    return SatisfyingSet(tuple(found))


@lru_cache(maxsize=1 << 16)
def _count(length: int, bounds: tuple[tuple[int, int, int], ...]) -> int:
    """Strings of ``length`` where set i (size s) is used between lo and hi times.

    ``bounds`` holds (size, lo, hi) per set. Sets are placed one at a time:
    putting k characters of a size-s set into a string that already holds
    n characters multiplies the count by C(n + k, k) * s^k.
    """
    ways = {0: 1}
    for size, lo, hi in bounds:
        nxt: dict[int, int] = {}
        for n, w in ways.items():
            for k in range(lo, min(hi, length - n) + 1):
                nxt[n + k] = nxt.get(n + k, 0) + w * comb(n + k, k) * size**k
        ways = nxt
    return ways.get(length, 0)


def _bounds(policy: Policy, used: list[int]) -> tuple[tuple[int, int, int], ...]:
    return tuple(
        (s.size, max(0, s.min_occurs - u), s.max_occurs - u)
        for s, u in zip(policy.sets, used)
    )


def count_satisfying(policy: Policy) -> int:
    return _count(policy.length, _bounds(policy, [0] * len(policy.sets)))


@lru_cache(maxsize=1 << 16)
def _completions_cached(policy: Policy, used: tuple[int, ...], left: int) -> int:
    if any(u > s.max_occurs for s, u in zip(policy.sets, used)):
        return 0
    return _count(left, _bounds(policy, list(used)))


def _completions(policy: Policy, used: list[int], left: int) -> int:
    return _completions_cached(policy, tuple(used), left)


def unrank(policy: Policy, rank: int) -> str:
    """The ``rank``-th satisfying password in code-point lexicographic order."""
    total = count_satisfying(policy)
    if not 0 <= rank < total:
        raise IndexError(f"rank {rank} outside [0, {total})")
    owner = policy.set_index()
    used = [0] * len(policy.sets)
    out = []
    for pos in range(policy.length):
        left = policy.length - pos - 1
        # characters of one set all have the same completion count
        per_set = []
        for i in range(len(policy.sets)):
            used[i] += 1
            per_set.append(_completions(policy, used, left))
            used[i] -= 1
        for c in policy.alphabet:
            i = owner[c]
            if rank < per_set[i]:
                out.append(c)
                used[i] += 1
                break
            rank -= per_set[i]
        else:
            raise AssertionError("unranking walked past the last character")
    return "".join(out)


def rank(policy: Policy, pw: str) -> int:
    """Inverse of unrank for satisfying passwords."""
    if not (satisfies_length(pw, policy) and satisfies_bounds(pw, policy)):
        raise ValueError(f"{pw!r} does not satisfy the policy")
    owner = policy.set_index()
    used = [0] * len(policy.sets)
    r = 0
    for pos, ch in enumerate(pw):
        left = policy.length - pos - 1
        for c in policy.alphabet:
            if c == ch:
                break
            i = owner[c]
            used[i] += 1
            r += _completions(policy, used, left)
            used[i] -= 1
        used[owner[ch]] += 1
    return r


def ideal_sample(policy: Policy, cs: ChoiceSource) -> str:
    return unrank(policy, cs.choose(count_satisfying(policy)))


class _ReplaySource:
    """Follows a prefix of choices, then picks 0; records every fan-out."""

    def __init__(self, prefix: list[int]):
        self.prefix = prefix
        self.fanouts: list[int] = []
        self.picks: list[int] = []

    def choose(self, n: int) -> int:
        depth = len(self.picks)
        pick = self.prefix[depth] if depth < len(self.prefix) else 0
        if n < 1:
            raise ValueError(f"choose({n})")
        self.fanouts.append(n)
        self.picks.append(pick)
        return pick


def enumerate_branches(
    proc: Callable[[ChoiceSource], Hashable], max_branches: int = MAX_BRANCHES
) -> Iterator[tuple[Fraction, Hashable]]:
    """Yield (probability, output) for every choice sequence ``proc`` can follow.

    Each ``choose(n)`` is an ideal uniform draw, so a leaf's probability is
    the product of 1/n over the draws on its path. The tree is walked depth
    first by re-running ``proc`` on successive choice prefixes.
    """
    prefix: list[int] = []
    leaves = 0
    while True:
        src = _ReplaySource(prefix)
        out = proc(src)
        leaves += 1
        if leaves > max_branches:
            raise DomainTooLarge(f"more than {max_branches} branches")
        yield Fraction(1, prod(src.fanouts)), out
        picks, fanouts = src.picks, src.fanouts
        d = len(picks) - 1
        while d >= 0 and picks[d] + 1 >= fanouts[d]:
            d -= 1
        if d < 0:
            return
        prefix = picks[:d] + [picks[d] + 1]


def exact_distribution(
    proc: Callable[[ChoiceSource], Hashable], max_branches: int = MAX_BRANCHES
) -> ExactDistribution:
    acc: dict[Hashable, Fraction] = {}
    for weight, out in enumerate_branches(proc, max_branches):
        acc[out] = acc.get(out, Fraction(0)) + weight
    return ExactDistribution(acc)


def generate_distribution(policy: Policy, max_branches: int = MAX_BRANCHES) -> ExactDistribution:
    """Exact output law of the generator, refusing up front if the tree is too big."""
    n = generator.branch_count(policy)
    if n > max_branches:
        raise DomainTooLarge(f"generator has {n} branches on this policy, limit {max_branches}")
    return exact_distribution(lambda cs: generator.generate(policy, cs), max_branches)


def ideal_distribution(policy: Policy, max_branches: int = MAX_BRANCHES) -> ExactDistribution:
    n = count_satisfying(policy)
    if n > max_branches:
        raise DomainTooLarge(f"{n} satisfying passwords, limit {max_branches}")
    return exact_distribution(lambda cs: ideal_sample(policy, cs), max_branches)
