"""Password composition policies: data model, validation and the JSON format."""

from __future__ import annotations

import enum
import json
import string
from dataclasses import dataclass, replace
from typing import Any

MIN_LENGTH = 1
MAX_LENGTH = 200

DEFAULT_CHARSETS = {
    "lowercase": string.ascii_lowercase,
    "uppercase": string.ascii_uppercase,
    "digits": string.digits,
    "special": "-_.:!",
}

# printable ASCII minus whitespace
_ALLOWED_CHARS = frozenset(chr(c) for c in range(0x21, 0x7F))


class PolicyErrorKind(str, enum.Enum):
    LENGTH_OUT_OF_RANGE = "LengthOutOfRange"
    EMPTY_SET = "EmptySet"
    DUPLICATE_CHARS = "DuplicateChars"
    OVERLAPPING_SETS = "OverlappingSets"
    MIN_EXCEEDS_MAX = "MinExceedsMax"
    UNSATISFIABLE = "Unsatisfiable"
    UNKNOWN_SET_NAME = "UnknownSetName"
    MALFORMED_INPUT = "MalformedInput"


class PolicyError(ValueError):
    def __init__(self, kind: PolicyErrorKind, detail: str):
        super().__init__(f"{kind.value}: {detail}")
        self.kind = kind
        self.detail = detail


@dataclass(frozen=True)
class CharSetSpec:
    """A named set of distinct characters with occurrence bounds."""

    name: str
    chars: str
    min_occurs: int = 0
    max_occurs: int = 0

    @property
    def size(self) -> int:
        return len(self.chars)


@dataclass(frozen=True)
class Policy:
    length: int
    sets: tuple[CharSetSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(self.sets))

    @property
    def alphabet(self) -> str:
        """Union of all set characters, sorted by code point."""
        return "".join(sorted(c for s in self.sets for c in s.chars))

    def set_index(self) -> dict[str, int]:
        """Map each character to the index of the (unique) set holding it."""
        return {c: i for i, s in enumerate(self.sets) for c in s.chars}


def default_charset(name: str, max_occurs: int = MAX_LENGTH) -> CharSetSpec:
    try:
        chars = DEFAULT_CHARSETS[name]
    except KeyError:
        raise PolicyError(PolicyErrorKind.UNKNOWN_SET_NAME, f"no default set named {name!r}") from None
    return CharSetSpec(name, chars, 0, max_occurs)


def _check_int(value: Any, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise PolicyError(PolicyErrorKind.MALFORMED_INPUT, f"{what} must be an integer, got {value!r}")
    return value


def validate(policy: Policy) -> Policy:
    """Check every policy invariant and return a copy with maxima clamped to the length.

    Errors are reported in a fixed order: length, then each set in list
    order, then pairwise disjointness, then satisfiability.
    """
    length = _check_int(policy.length, "length")
    if not MIN_LENGTH <= length <= MAX_LENGTH:
        raise PolicyError(
            PolicyErrorKind.LENGTH_OUT_OF_RANGE,
            f"length {length} outside [{MIN_LENGTH}, {MAX_LENGTH}]",
        )
    if not policy.sets:
        raise PolicyError(PolicyErrorKind.MALFORMED_INPUT, "policy has no character sets")

    clamped = []
    for s in policy.sets:
        if not isinstance(s.chars, str) or not s.chars:
            raise PolicyError(PolicyErrorKind.EMPTY_SET, f"set {s.name!r} has no characters")
        if len(set(s.chars)) != len(s.chars):
            raise PolicyError(PolicyErrorKind.DUPLICATE_CHARS, f"set {s.name!r} repeats a character")
        bad = sorted(set(s.chars) - _ALLOWED_CHARS)
        if bad:
            raise PolicyError(
                PolicyErrorKind.MALFORMED_INPUT,
                f"set {s.name!r} contains characters outside printable ASCII: {bad!r}",
            )
        lo = _check_int(s.min_occurs, f"min of set {s.name!r}")
        hi = _check_int(s.max_occurs, f"max of set {s.name!r}")
        if lo < 0:
            raise PolicyError(PolicyErrorKind.MALFORMED_INPUT, f"set {s.name!r} has negative min {lo}")
        if lo > hi:
            raise PolicyError(PolicyErrorKind.MIN_EXCEEDS_MAX, f"set {s.name!r}: min {lo} > max {hi}")
        clamped.append(replace(s, max_occurs=min(hi, length)))

    seen: dict[str, str] = {}
    for s in clamped:
        for c in s.chars:
            if c in seen:
                raise PolicyError(
                    PolicyErrorKind.OVERLAPPING_SETS,
                    f"character {c!r} is in both {seen[c]!r} and {s.name!r}",
                )
            seen[c] = s.name

    lo_total = sum(s.min_occurs for s in clamped)
    hi_total = sum(s.max_occurs for s in clamped)
    if lo_total > length:
        raise PolicyError(PolicyErrorKind.UNSATISFIABLE, f"sum of minima {lo_total} exceeds length {length}")
    if hi_total < length:
        raise PolicyError(PolicyErrorKind.UNSATISFIABLE, f"sum of maxima {hi_total} is below length {length}")
    return Policy(length, tuple(clamped))


def witness(policy: Policy) -> str:
    """A password satisfying a validated policy, built greedily."""
    parts = [s.chars[0] * s.min_occurs for s in policy.sets]
    missing = policy.length - sum(s.min_occurs for s in policy.sets)
    for s in policy.sets:
        extra = min(missing, s.max_occurs - s.min_occurs)
        parts.append(s.chars[0] * extra)
        missing -= extra
    return "".join(parts)


_SET_KEYS = {"name", "chars", "min", "max"}


def policy_from_dict(data: Any) -> Policy:
    """Build and validate a policy from the decoded external JSON format."""
    if not isinstance(data, dict):
        raise PolicyError(PolicyErrorKind.MALFORMED_INPUT, "policy must be a JSON object")
    unknown = set(data) - {"length", "sets"}
    if unknown:
        raise PolicyError(PolicyErrorKind.MALFORMED_INPUT, f"unknown keys {sorted(unknown)}")
    if "length" not in data:
        raise PolicyError(PolicyErrorKind.MALFORMED_INPUT, "missing 'length'")
    if "sets" not in data:
        raise PolicyError(PolicyErrorKind.MALFORMED_INPUT, "missing 'sets'")
    length = _check_int(data["length"], "length")
    raw_sets = data["sets"]
    if not isinstance(raw_sets, list) or not raw_sets:
        raise PolicyError(PolicyErrorKind.MALFORMED_INPUT, "'sets' must be a nonempty list")

    sets = []
    for obj in raw_sets:
        if not isinstance(obj, dict):
            raise PolicyError(PolicyErrorKind.MALFORMED_INPUT, "each set must be a JSON object")
        unknown = set(obj) - _SET_KEYS
        if unknown:
            raise PolicyError(PolicyErrorKind.MALFORMED_INPUT, f"unknown set keys {sorted(unknown)}")
        if ("name" in obj) == ("chars" in obj):
            raise PolicyError(PolicyErrorKind.MALFORMED_INPUT, "a set needs exactly one of 'name' or 'chars'")
        lo = _check_int(obj.get("min", 0), "min")
        hi = _check_int(obj.get("max", length), "max")
        if "name" in obj:
            if not isinstance(obj["name"], str):
                raise PolicyError(PolicyErrorKind.MALFORMED_INPUT, "'name' must be a string")
            base = default_charset(obj["name"])
            sets.append(CharSetSpec(base.name, base.chars, lo, hi))
        else:
            chars = obj["chars"]
            if not isinstance(chars, str):
                raise PolicyError(PolicyErrorKind.MALFORMED_INPUT, "'chars' must be a string")
            sets.append(CharSetSpec(chars, chars, lo, hi))
    return validate(Policy(length, tuple(sets)))


def parse_policy(text: str) -> Policy:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PolicyError(PolicyErrorKind.MALFORMED_INPUT, f"invalid JSON: {exc}") from None
    return policy_from_dict(data)


def policy_to_dict(policy: Policy) -> dict:
    sets = []
    for s in policy.sets:
        if DEFAULT_CHARSETS.get(s.name) == s.chars:
            obj: dict[str, Any] = {"name": s.name}
        else:
            obj = {"chars": s.chars}
        obj["min"] = s.min_occurs
        obj["max"] = s.max_occurs
        sets.append(obj)
    return {"length": policy.length, "sets": sets}


def dump_policy(policy: Policy) -> str:
    return json.dumps(policy_to_dict(policy), sort_keys=True)
