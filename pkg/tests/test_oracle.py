import itertools
from fractions import Fraction

import pytest

from grid import shape_policies, small_policies
from refpass.checker import satisfies
from refpass.generator import branch_count, generate
from refpass.oracle import (
    DomainTooLarge,
    ExactDistribution,
    count_satisfying,
    enumerate_branches,
    enumerate_satisfying,
    exact_distribution,
    generate_distribution,
    ideal_distribution,
    ideal_sample,
    rank,
    unrank,
)
from refpass.policy import CharSetSpec, Policy, validate
from refpass.rng import ScriptedChoiceSource

EXAMPLE = validate(Policy(2, (CharSetSpec("ab", "ab", 1, 2), CharSetSpec("01", "01", 0, 2))))


def hand_enumeration_of_example():
    """The 16 leaves of the example policy, traced without the generator code."""
    acc = {}
    for first in "ab":                      # min-phase: choose(2) on "ab"
        for second in "ab01":               # fill-phase: choose(4) on the union
            for j in (0, 1):                # shuffle: i=1, j = choose(2)
                pw = first + second if j == 1 else second + first
                acc[pw] = acc.get(pw, 0) + Fraction(1, 16)
    return acc


def test_example_distribution_matches_hand_enumeration():
    dist = generate_distribution(EXAMPLE)
    assert dict(dist.entries) == hand_enumeration_of_example()
    assert dist["ab"] == Fraction(1, 8)
    assert dist["a0"] == dist["0a"] == Fraction(1, 16)
    assert dist["aa"] == Fraction(1, 8)
    assert dist.total() == 1


def test_enumerate_satisfying_examples():
    s = enumerate_satisfying(EXAMPLE)
    assert s.count == 12
    assert set(s.passwords) == {x + y for x in "ab01" for y in "ab01"} - {"00", "01", "10", "11"}
    assert list(s.passwords) == sorted(s.passwords)
    assert enumerate_satisfying(validate(Policy(1, (CharSetSpec("a", "a", 0, 1),)))).passwords == ("a",)
    two = validate(Policy(2, (CharSetSpec("ab", "ab", 2, 2),)))
    assert enumerate_satisfying(two).passwords == ("aa", "ab", "ba", "bb")


def test_enumerate_satisfying_guard():
    big = validate(Policy(6, (CharSetSpec("lowercase", "abcdefghijklmnopqrstuvwxyz", 0, 6),)))
    with pytest.raises(DomainTooLarge):
        enumerate_satisfying(big)


def test_count_closed_forms():
    assert count_satisfying(EXAMPLE) == 12
    for s, L in [(1, 1), (4, 3), (26, 200), (67, 16)]:
        chars = "".join(chr(0x21 + i) for i in range(s))
        assert count_satisfying(validate(Policy(L, (CharSetSpec("x", chars, 0, L),)))) == s**L


def brute_count(policy):
    return sum(1 for t in itertools.product(policy.alphabet, repeat=policy.length) if satisfies("".join(t), policy))


@pytest.mark.slow
def test_count_agrees_with_enumeration_on_grid():
    for p in shape_policies(max_alphabet=6, max_length=4, max_sets=3):
        assert count_satisfying(p) == brute_count(p), p


def test_unrank_example():
    assert ideal_sample(EXAMPLE, ScriptedChoiceSource([0])) == "0a"
    listed = enumerate_satisfying(EXAMPLE).passwords
    for r, pw in enumerate(listed):
        assert unrank(EXAMPLE, r) == pw
        assert rank(EXAMPLE, pw) == r
    with pytest.raises(IndexError):
        unrank(EXAMPLE, 12)
    with pytest.raises(ValueError):
        rank(EXAMPLE, "00")


def test_unrank_large_policy_round_trip():
    p = validate(Policy(24, (
        CharSetSpec("lowercase", "abcdefghijklmnopqrstuvwxyz", 2, 10),
        CharSetSpec("uppercase", "ABCDEFGHIJKLMNOPQRSTUVWXYZ", 2, 24),
        CharSetSpec("digits", "0123456789", 3, 5),
        CharSetSpec("special", "-_.:!", 1, 2),
    )))
    n = count_satisfying(p)
    for r in (0, 1, n // 3, n // 2 + 12345, n - 1):
        pw = unrank(p, r)
        assert satisfies(pw, p)
        assert rank(p, pw) == r
    assert unrank(p, 0) < unrank(p, 1) < unrank(p, n - 1)


def test_exact_distribution_unconstrained_small():
    p = validate(Policy(2, (CharSetSpec("ab", "ab", 0, 2),)))
    dist = generate_distribution(p)
    assert dict(dist.entries) == {k: Fraction(1, 4) for k in ("aa", "ab", "ba", "bb")}
    assert len(list(enumerate_branches(lambda cs: generate(p, cs)))) == 8


def test_ideal_distribution_uniform():
    dist = ideal_distribution(EXAMPLE)
    assert dict(dist.entries) == {pw: Fraction(1, 12) for pw in enumerate_satisfying(EXAMPLE).passwords}


def test_exact_distribution_of_plain_procedure():
    def two_dice(cs):
        return cs.choose(6) + cs.choose(6)

    dist = exact_distribution(two_dice)
    assert dist[5] == Fraction(6, 36) and dist[0] == Fraction(1, 36) and dist[11] == 0
    assert dist.total() == 1


def test_exact_distribution_guard():
    with pytest.raises(DomainTooLarge):
        exact_distribution(lambda cs: cs.choose(1000) + cs.choose(1000), max_branches=10_000)
    big = validate(Policy(8, (CharSetSpec("lowercase", "abcdefghijklmnopqrstuvwxyz", 0, 8),)))
    with pytest.raises(DomainTooLarge):
        generate_distribution(big)


def test_distribution_json_round_trip():
    dist = generate_distribution(EXAMPLE)
    assert ExactDistribution.from_json(dist.to_json()) == dist


@pytest.mark.slow
def test_support_and_branch_count_on_grid():
    for p in small_policies(max_alphabet=4, max_length=3):
        leaves = list(enumerate_branches(lambda cs: generate(p, cs)))
        assert len(leaves) == branch_count(p)
        support = {pw for _, pw in leaves}
        # sound and complete: exactly the satisfying set
        assert support == set(enumerate_satisfying(p).passwords), p
