"""Real-vs-ideal distinguishing experiments for the generator.

The real game samples the generator, the ideal game samples uniformly from
the satisfying set. In exact mode both output laws come from branch
enumeration and the reported advantage is the total variation distance,
which is what the best single-query distinguisher achieves: it answers
"real" exactly when the observed password is likelier under the generator.
"""

from __future__ import annotations

import json
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Optional, Union

from . import oracle
from .generator import generate
from .oracle import ExactDistribution
from .policy import Policy, policy_from_dict, policy_to_dict
from .rng import ChoiceSource, seeded_choice_source, system_choice_source

Number = Union[Fraction, float]

# samples per independently seeded chunk; fixed so results do not depend on thread count
CHUNK_SIZE = 4096


@dataclass(frozen=True)
class TableRow:
    pw: str
    real_prob: Number
    ideal_prob: Number


@dataclass(frozen=True)
class GameReport:
    policy: Policy
    mode: str
    samples: Optional[int]
    tv_distance: Number
    chi2_statistic: float
    chi2_dof: int
    advantage_estimate: float
    per_password: Optional[tuple[TableRow, ...]] = None

    def to_dict(self) -> dict:
        out: dict = {"policy": policy_to_dict(self.policy), "mode": self.mode}
        if self.samples is not None:
            out["samples"] = self.samples
        out["tv"] = _num_to_json(self.tv_distance)
        out["chi2"] = self.chi2_statistic
        out["dof"] = self.chi2_dof
        out["advantage"] = self.advantage_estimate
        if self.per_password is not None:
            out["table"] = [
                {"pw": r.pw, "real": _num_to_json(r.real_prob), "ideal": _num_to_json(r.ideal_prob)}
                for r in self.per_password
            ]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> GameReport:
        table = data.get("table")
        rows = None
        if table is not None:
            rows = tuple(
                TableRow(r["pw"], _num_from_json(r["real"]), _num_from_json(r["ideal"])) for r in table
            )
        return cls(
            policy=policy_from_dict(data["policy"]),
            mode=data["mode"],
            samples=data.get("samples"),
            tv_distance=_num_from_json(data["tv"]),
            chi2_statistic=float(data["chi2"]),
            chi2_dof=int(data["dof"]),
            advantage_estimate=float(data["advantage"]),
            per_password=rows,
        )

    @classmethod
    def from_json(cls, text: str) -> GameReport:
        return cls.from_dict(json.loads(text))


def _num_to_json(x: Number):
    if isinstance(x, Fraction):
        return {"num": str(x.numerator), "den": str(x.denominator)}
    return float(x)


def _num_from_json(x) -> Number:
    if isinstance(x, dict):
        return Fraction(int(x["num"]), int(x["den"]))
    return float(x)


def run_real_game(policy: Policy, n: int, cs: ChoiceSource) -> Counter:
    if n < 1:
        raise ValueError("need at least one sample")
    return Counter(generate(policy, cs) for _ in range(n))


def run_ideal_game(policy: Policy, n: int, cs: ChoiceSource) -> Counter:
    if n < 1:
        raise ValueError("need at least one sample")
    return Counter(oracle.ideal_sample(policy, cs) for _ in range(n))


def normalize(hist: Mapping[str, int]) -> dict[str, Fraction]:
    total = sum(hist.values())
    return {k: Fraction(v, total) for k, v in hist.items() if v}


def tv_distance(a: Mapping, b: Mapping) -> Number:
    """Half the L1 distance between two normalized distributions."""
    keys = set(a) | set(b)
    return sum((abs(a.get(k, 0) - b.get(k, 0)) for k in keys), Fraction(0)) / 2


def chi_squared(hist: Mapping[str, int], expected: Mapping[str, Number]) -> tuple[float, int]:
    """Pearson statistic of observed counts against an exact distribution.

    Every observed key must be in the expected support; expected keys that
    were never observed contribute their full expected count.
    """
    n = sum(hist.values())
    if n < 1:
        raise ValueError("empty histogram")
    stray = [k for k, v in hist.items() if v and k not in expected]
    if stray:
        raise ValueError(f"observed outcomes outside the expected support: {stray[:5]}")
    stat = 0.0
    for k, p in expected.items():
        e = n * float(p)
        stat += (hist.get(k, 0) - e) ** 2 / e
    return stat, len(expected) - 1


def _chi2_vs_uniform(hist: Mapping[str, int], count: int) -> float:
    # avoids materializing the satisfying set
    n = sum(hist.values())
    e = n / count
    seen = [v for v in hist.values() if v]
    return sum((v - e) ** 2 / e for v in seen) + (count - len(seen)) * e


def _sample_chunks(
    game: Callable[[Policy, int, ChoiceSource], Counter],
    policy: Policy,
    samples: int,
    make_source: Callable[[int], ChoiceSource],
    threads: int,
) -> Counter:
    sizes = [CHUNK_SIZE] * (samples // CHUNK_SIZE)
    if samples % CHUNK_SIZE:
        sizes.append(samples % CHUNK_SIZE)

    def work(i: int) -> Counter:
        return game(policy, sizes[i], make_source(i))

    if threads <= 1:
        parts = [work(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, range(len(sizes))))
    merged: Counter = Counter()
    for part in parts:
        merged.update(part)
    return merged


def advantage_report(
    policy: Policy,
    mode: str = "exact",
    samples: Optional[int] = None,
    cs: Optional[ChoiceSource] = None,
    *,
    seed: Optional[int] = None,
    variant: str = "chrome",
    threads: int = 1,
    table: Optional[bool] = None,
    max_branches: int = oracle.MAX_BRANCHES,
) -> GameReport:
    """Run the real and ideal games on ``policy`` and summarize how far apart they are.

    Exact mode enumerates both games and needs no randomness. Empirical
    mode draws ``samples`` passwords from each game. With an explicit
    ``cs`` both games share it sequentially; with ``seed`` (or neither,
    meaning the system CSPRNG) samples are drawn in fixed-size chunks, each
    with its own source, so the result does not depend on ``threads``.
    """
    if mode == "exact":
        return _exact_report(policy, table is not False, max_branches)
    if mode != "empirical":
        raise ValueError(f"unknown mode {mode!r}")
    if samples is None or samples < 1:
        raise ValueError("empirical mode needs samples >= 1")

    if cs is not None:
        real = run_real_game(policy, samples, cs)
        ideal = run_ideal_game(policy, samples, cs)
    else:
        if seed is None:
            make_real = make_ideal = lambda i: system_choice_source(variant)
        else:
            make_real = lambda i: seeded_choice_source(seed, 2 * i, variant)
            make_ideal = lambda i: seeded_choice_source(seed, 2 * i + 1, variant)
        real = _sample_chunks(run_real_game, policy, samples, make_real, threads)
        ideal = _sample_chunks(run_ideal_game, policy, samples, make_ideal, threads)

    count = oracle.count_satisfying(policy)
    tv = float(tv_distance(normalize(real), normalize(ideal)))
    rows = None
    if table:
        p = Fraction(1, count)
        rows = tuple(
            TableRow(pw, real.get(pw, 0) / samples, float(p))
            for pw in sorted(set(real) | set(ideal))
        )
    return GameReport(
        policy=policy,
        mode="empirical",
        samples=samples,
        tv_distance=tv,
        chi2_statistic=_chi2_vs_uniform(real, count),
        chi2_dof=count - 1,
        advantage_estimate=tv,
        per_password=rows,
    )


def _exact_report(policy: Policy, with_table: bool, max_branches: int) -> GameReport:
    real = oracle.generate_distribution(policy, max_branches)
    ideal = oracle.ideal_distribution(policy, max_branches)
    tv = tv_distance(real.entries, ideal.entries)
    # chi-squared divergence of the real law from the ideal one (the per-sample statistic)
    chi2 = float(sum(((real[k] - p) ** 2 / p for k, p in ideal.items()), Fraction(0)))
    rows = None
    if with_table:
        rows = tuple(TableRow(pw, real[pw], ideal[pw]) for pw in sorted(set(real) | set(ideal)))
    return GameReport(
        policy=policy,
        mode="exact",
        samples=None,
        tv_distance=tv,
        chi2_statistic=chi2,
        chi2_dof=len(ideal) - 1,
        advantage_estimate=float(tv),
        per_password=rows,
    )


def best_distinguisher_advantage(real: ExactDistribution, ideal: ExactDistribution) -> Fraction:
    """Advantage of the adversary that says "real" iff real_prob > ideal_prob."""
    guess_real = {k for k in set(real) | set(ideal) if real[k] > ideal[k]}
    return sum((real[k] for k in guess_real), Fraction(0)) - sum((ideal[k] for k in guess_real), Fraction(0))
