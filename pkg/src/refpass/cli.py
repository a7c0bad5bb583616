"""Command-line front end.

Exit codes: 0 success, 1 password fails the policy (``check``), 2 bad input
or policy, 3 the requested enumeration is too large.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import checker, harness, oracle
from .generator import generate
from .policy import (
    DEFAULT_CHARSETS,
    MAX_LENGTH,
    CharSetSpec,
    Policy,
    PolicyError,
    PolicyErrorKind,
    default_charset,
    parse_policy,
    validate,
)
from .rng import VARIANTS, seeded_choice_source, system_choice_source

EXIT_OK = 0
EXIT_UNSATISFIED = 1
EXIT_INPUT = 2
EXIT_TOO_LARGE = 3


class UsageError(Exception):
    pass


def _seed(text: str) -> int:
    try:
        value = int(text, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be a decimal integer, got {text!r}") from None
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _add_policy_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("policy (either --policy or inline flags)")
    g.add_argument("--policy", type=Path, help="policy JSON file")
    g.add_argument("--length", type=int, help="password length")
    g.add_argument(
        "--charset",
        action="append",
        default=[],
        metavar="SET",
        help="lowercase, uppercase, digits, special, or literal:<chars> (repeatable)",
    )
    g.add_argument("--min", action="append", default=[], metavar="NAME=K", dest="mins")
    g.add_argument("--max", action="append", default=[], metavar="NAME=K", dest="maxes")


def _add_rng_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=_seed, help="decimal u64; selects the deterministic source")
    p.add_argument("--rng", choices=VARIANTS, default="chrome", help="rejection sampler variant")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="refpass", description="Policy-driven random password generation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate passwords")
    _add_policy_args(p)
    _add_rng_args(p)
    p.add_argument("-n", "--count", type=_positive, default=1)
    p.add_argument("--output", choices=("text", "json"), default="text")

    p = sub.add_parser("check", help="check a password read from stdin against a policy")
    _add_policy_args(p)

    p = sub.add_parser("count", help="number of passwords satisfying a policy")
    _add_policy_args(p)

    p = sub.add_parser("exact", help="exact output distribution")
    _add_policy_args(p)
    p.add_argument("--game", choices=("real", "ideal"), default="real")

    p = sub.add_parser("audit", help="real-vs-ideal distinguishing report")
    _add_policy_args(p)
    _add_rng_args(p)
    p.add_argument("--mode", choices=("exact", "empirical"), default="exact")
    p.add_argument("--samples", type=_positive, default=10_000)
    p.add_argument("--threads", type=_positive, default=1)
    p.add_argument("--table", action="store_true", help="include the per-password table in empirical mode")
    return parser


def _parse_assignments(items: list[str], flag: str) -> dict[str, int]:
    out = {}
    for item in items:
        name, sep, value = item.rpartition("=")
        if not sep or not name:
            raise PolicyError(PolicyErrorKind.MALFORMED_INPUT, f"{flag} expects NAME=K, got {item!r}")
        try:
            out[name] = int(value)
        except ValueError:
            raise PolicyError(PolicyErrorKind.MALFORMED_INPUT, f"{flag} {item!r}: K must be an integer") from None
    return out


def _charset(spec: str, length: int) -> CharSetSpec:
    if spec in DEFAULT_CHARSETS:
        return default_charset(spec, length)
    chars = spec[len("literal:"):] if spec.startswith("literal:") else spec
    return CharSetSpec(chars, chars, 0, length)


def load_policy(args: argparse.Namespace) -> Policy:
    inline = args.length is not None or args.charset or args.mins or args.maxes
    if args.policy is not None:
        if inline:
            raise UsageError("--policy cannot be combined with inline policy flags")
        try:
            text = args.policy.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise PolicyError(PolicyErrorKind.MALFORMED_INPUT, f"cannot read {args.policy}: {exc}") from None
        return parse_policy(text)
    if args.length is None:
        raise UsageError("give --policy or --length")
    if not args.charset:
        raise UsageError("give at least one --charset")
    sets = [_charset(c, min(max(args.length, 0), MAX_LENGTH)) for c in args.charset]
    by_name = {s.name: i for i, s in enumerate(sets)}
    for flag, values, field in (("--min", args.mins, "min_occurs"), ("--max", args.maxes, "max_occurs")):
        for name, k in _parse_assignments(values, flag).items():
            if name not in by_name:
                raise PolicyError(PolicyErrorKind.UNKNOWN_SET_NAME, f"{flag}: no set named {name!r}")
            i = by_name[name]
            sets[i] = replace(sets[i], **{field: k})
    return validate(Policy(args.length, tuple(sets)))


def _source(args: argparse.Namespace):
    if args.seed is None:
        return system_choice_source(args.rng)
    return seeded_choice_source(args.seed, 0, args.rng)


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def cmd_generate(args: argparse.Namespace) -> int:
    policy = load_policy(args)
    cs = _source(args)
    passwords = [generate(policy, cs) for _ in range(args.count)]
    if args.output == "json":
        print(json.dumps(passwords))
    else:
        for pw in passwords:
            print(pw)
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    policy = load_policy(args)
    line = sys.stdin.readline()
    pw = line[:-1] if line.endswith("\n") else line
    if pw.endswith("\r"):
        pw = pw[:-1]
    return EXIT_OK if checker.satisfies(pw, policy) else EXIT_UNSATISFIED


def cmd_count(args: argparse.Namespace) -> int:
    _emit({"count": str(oracle.count_satisfying(load_policy(args)))})
    return EXIT_OK


def cmd_exact(args: argparse.Namespace) -> int:
    policy = load_policy(args)
    if args.game == "real":
        dist = oracle.generate_distribution(policy)
    else:
        dist = oracle.ideal_distribution(policy)
    _emit(dist.to_json())
    return EXIT_OK


def cmd_audit(args: argparse.Namespace) -> int:
    policy = load_policy(args)
    if args.mode == "exact":
        report = harness.advantage_report(policy, "exact")
    else:
        report = harness.advantage_report(
            policy,
            "empirical",
            args.samples,
            seed=args.seed,
            variant=args.rng,
            threads=args.threads,
            table=args.table,
        )
    print(report.to_json())
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "check": cmd_check,
    "count": cmd_count,
    "exact": cmd_exact,
    "audit": cmd_audit,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except PolicyError as exc:
        print(f"error: {exc.kind.value}: {exc.detail}", file=sys.stderr)
        return EXIT_INPUT
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except oracle.DomainTooLarge as exc:
        print(f"error: DomainTooLarge: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE


if __name__ == "__main__":
    sys.exit(main())
