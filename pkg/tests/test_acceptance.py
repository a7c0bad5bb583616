"""Exit criteria for the package. Each test is one criterion; tolerances are exact
unless stated. Run ``pytest tests/test_acceptance.py`` for the summary table."""

import itertools
import json
import random
import subprocess
import sys
from fractions import Fraction
from math import factorial

import numpy as np

from grid import small_policies
from refpass.checker import correctness_experiment
from refpass.generator import generate, permute
from refpass.harness import advantage_report, chi_squared, run_real_game, tv_distance
from refpass.oracle import (
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
from refpass.policy import DEFAULT_CHARSETS, CharSetSpec, Policy, PolicyError, validate
from refpass.rng import chrome_accepts, keepass_accepts, max_accepted, seeded_choice_source, system_choice_source

UNCONSTRAINED = validate(Policy(3, (CharSetSpec("abcd", "abcd", 0, 3),)))
EXAMPLE = validate(Policy(2, (CharSetSpec("ab", "ab", 1, 2), CharSetSpec("01", "01", 0, 2))))

# recorded once from the exact oracles; must not drift
EXAMPLE_TV = Fraction(1, 6)

# central 99% region of chi-squared with 63 dof: scipy.stats.chi2.ppf([0.005, 0.995], 63)
CHI2_63_LOW, CHI2_63_HIGH = 37.83818926, 95.64929748
CHI2_SEED = 2026


def test_c1_correctness_exhaustive_and_fuzzed():
    grid = list(small_policies(max_alphabet=4, max_length=3))
    branches = failures = 0
    for p in grid:
        for _, ok in enumerate_branches(lambda cs: correctness_experiment(p, generate, cs)):
            branches += 1
            failures += not ok
    assert failures == 0, f"{failures}/{branches} branches violate the policy"

    rng = random.Random(20260101)
    pool = list(DEFAULT_CHARSETS.items())
    cs = system_choice_source()
    accepted = 0
    while accepted < 10_000:
        length = rng.randint(1, 32)
        chosen = rng.sample(pool, rng.randint(1, 4))
        sets = []
        for name, chars in chosen:
            hi = rng.randint(0, length + 2)
            lo = rng.randint(0, min(hi, length))
            sets.append(CharSetSpec(name, chars, lo, hi))
        try:
            p = validate(Policy(length, tuple(sets)))
        except PolicyError:
            continue
        accepted += 1
        for _ in range(10):
            assert correctness_experiment(p, generate, cs), p


def test_c2_rejection_sampler_uniformity():
    for bits in range(4, 13):
        words = np.arange(2**bits, dtype=np.int64)
        for range_ in range(1, 2**bits + 1):
            accepted = words[chrome_accepts(words, range_, bits)]
            counts = np.bincount(accepted % range_, minlength=range_)
            assert counts.min() == counts.max(), (bits, range_)
            assert counts.sum() == max_accepted(range_, bits) + 1
            if range_ < 2**bits:
                assert counts[0] == (2**bits - 1) // range_


def test_c3_chrome_keepass_equivalence():
    bits = 8
    words = np.arange(2**bits, dtype=np.int64)
    differing = [
        r for r in range(1, 2**bits + 1)
        if not np.array_equal(chrome_accepts(words, r, bits), keepass_accepts(words, r, bits))
    ]
    assert differing == [], f"accepted-word sets differ for ranges {differing}"


def test_c4_shuffle_uniformity():
    for n in (2, 3, 4):
        s = "abcd"[:n]
        outputs = [out for _, out in enumerate_branches(lambda cs: permute(s, cs))]
        assert len(outputs) == factorial(n)
        assert sorted(outputs) == sorted("".join(t) for t in itertools.permutations(s))


def test_c5_unconstrained_uniformity():
    dist = generate_distribution(UNCONSTRAINED)
    everything = ["".join(t) for t in itertools.product("abcd", repeat=3)]
    assert dict(dist.entries) == {pw: Fraction(1, 64) for pw in everything}
    report = advantage_report(UNCONSTRAINED, "exact")
    assert report.tv_distance == 0 and report.advantage_estimate == 0


def test_c6_constrained_nonuniformity_witness():
    dist = generate_distribution(EXAMPLE)
    assert dist["ab"] == Fraction(1, 8)
    assert dist["a0"] == Fraction(1, 16)
    # independent 16-leaf enumeration: min draw, fill draw from "ab01", one shuffle draw
    hand = {}
    for first in "ab":
        for second in "ab01":
            for keep in (True, False):
                pw = first + second if keep else second + first
                hand[pw] = hand.get(pw, 0) + Fraction(1, 16)
    assert dict(dist.entries) == hand
    assert count_satisfying(EXAMPLE) == 12 == enumerate_satisfying(EXAMPLE).count
    assert tv_distance(dist.entries, ideal_distribution(EXAMPLE).entries) == EXAMPLE_TV


def test_c7_ideal_sampler():
    for p in small_policies(max_alphabet=4, max_length=3):
        listed = enumerate_satisfying(p).passwords
        n = count_satisfying(p)
        assert n == len(listed)
        dist = exact_distribution(lambda cs: ideal_sample(p, cs))
        assert dict(dist.entries) == {pw: Fraction(1, n) for pw in listed}
        for r, pw in enumerate(listed):
            assert unrank(p, r) == pw and rank(p, pw) == r


def test_c8_chi_squared_sanity():
    hist = run_real_game(UNCONSTRAINED, 10**5, seeded_choice_source(CHI2_SEED))
    uniform = {"".join(t): Fraction(1, 64) for t in itertools.product("abcd", repeat=3)}
    stat, dof = chi_squared(hist, uniform)
    assert dof == 63
    assert CHI2_63_LOW <= stat <= CHI2_63_HIGH, stat


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "refpass", *args], capture_output=True, check=True).stdout


def test_c9_cli_determinism(tmp_path):
    policy = tmp_path / "p.json"
    policy.write_text(json.dumps({"length": 12, "sets": [{"name": "lowercase", "min": 2},
                                                         {"name": "digits", "min": 1, "max": 4},
                                                         {"name": "special", "min": 1}]}))
    gen = ["generate", "--policy", str(policy), "--seed", "123456789", "-n", "20"]
    assert _cli(*gen) == _cli(*gen)
    audit = ["audit", "--policy", str(tmp_path / "q.json"), "--mode", "empirical", "--samples", "20000", "--seed", "77"]
    (tmp_path / "q.json").write_text(json.dumps({"length": 2, "sets": [{"chars": "ab", "min": 1}, {"chars": "01"}]}))
    outs = {_cli(*audit, "--threads", t) for t in ("1", "1", "2", "4")}
    assert len(outs) == 1
