"""Byte sources and bias-free bounded integer sampling by rejection.

Two rejection rules are provided, modelled on the Chrome and KeePass
generators. Both reduce a uniformly drawn word modulo ``range_`` after
discarding words from an incomplete top block. The word width is a
parameter (64 bits by default) so that the acceptance regions can be
checked exhaustively at small widths.
"""

from __future__ import annotations

import hashlib
import os
from typing import Iterable, Protocol

DEFAULT_BITS = 64
MAX_REJECTIONS = 1 << 20

VARIANTS = ("chrome", "keepass")


class RejectionLimitExceeded(RuntimeError):
    pass


class ScriptExhausted(RuntimeError):
    pass


class ByteSource(Protocol):
    def next_bytes(self, count: int) -> bytes: ...


class ChoiceSource(Protocol):
    def choose(self, n: int) -> int: ...


class SystemByteSource:
    """Operating-system CSPRNG, read in buffered blocks."""

    def __init__(self, block: int = 4096):
        self._block = block
        self._buf = b""

    def next_bytes(self, count: int) -> bytes:
        if len(self._buf) < count:
            self._buf += os.urandom(max(self._block, count))
        out, self._buf = self._buf[:count], self._buf[count:]
        return out


class SeededByteSource:
    """Deterministic byte stream: SHA-256 in counter mode.

    Block ``i`` of stream ``(seed, stream)`` is
    ``SHA256(seed_le64 || stream_le64 || i_le64)``. The ``stream`` index
    gives independent substreams for the same seed.
    """

    def __init__(self, seed: int, stream: int = 0):
        if not 0 <= seed < 1 << 64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        if stream < 0:
            raise ValueError("stream must be nonnegative")
        self._key = seed.to_bytes(8, "little") + stream.to_bytes(8, "little")
        self._counter = 0
        self._buf = b""
        self._pos = 0

    def _refill(self, need: int) -> None:
        blocks = [self._buf[self._pos:]]
        have = len(blocks[0])
        while have < need or have < 256:
            blocks.append(hashlib.sha256(self._key + self._counter.to_bytes(8, "little")).digest())
            self._counter += 1
            have += 32
        self._buf = b"".join(blocks)
        self._pos = 0

    def next_bytes(self, count: int) -> bytes:
        if self._pos + count > len(self._buf):
            self._refill(count)
        out = self._buf[self._pos:self._pos + count]
        self._pos += count
        return out


class ScriptedByteSource:
    """Replays a fixed byte sequence; raises ScriptExhausted past its end."""

    def __init__(self, data: Iterable[int] | bytes):
        self._data = bytes(data)
        self._pos = 0

    def next_bytes(self, count: int) -> bytes:
        end = self._pos + count
        if end > len(self._data):
            raise ScriptExhausted(f"script has {len(self._data) - self._pos} bytes left, {count} requested")
        out = self._data[self._pos:end]
        self._pos = end
        return out


def words_to_bytes(words: Iterable[int], bits: int = DEFAULT_BITS) -> bytes:
    """Encode words the way word_from_bytes decodes them (for scripted tests)."""
    width = (bits + 7) // 8
    return b"".join(w.to_bytes(width, "little") for w in words)


def _check_bits(bits: int) -> None:
    if not 1 <= bits <= 64:
        raise ValueError(f"word width must be in [1, 64], got {bits}")


def _check_range(range_: int, bits: int) -> None:
    _check_bits(bits)
    if not 1 <= range_ <= 1 << bits:
        raise ValueError(f"range must be in [1, 2^{bits}], got {range_}")


def word_from_bytes(src: ByteSource, bits: int = DEFAULT_BITS) -> int:
    """Read ceil(bits/8) bytes as a little-endian unsigned integer, masked to ``bits``."""
    _check_bits(bits)
    return _read_word(src, (bits + 7) // 8, (1 << bits) - 1)


def max_accepted(range_: int, bits: int = DEFAULT_BITS) -> int:
    """Largest word the Chrome rule accepts: ``(M / range) * range - 1`` with M = 2^bits - 1.

    Evaluated in unsigned ``bits``-wide arithmetic, so ``range_ == 2**bits``
    wraps to M and accepts every word. For every other range the top
    ``range_`` words are rejected even when ``range_`` divides 2^bits.
    """
    _check_range(range_, bits)
    word_max = (1 << bits) - 1
    return ((word_max // range_) * range_ - 1) & word_max


def chrome_accepts(word, range_: int, bits: int = DEFAULT_BITS):
    # also works elementwise on integer arrays
    return word <= max_accepted(range_, bits)


def keepass_accepts(word, range_: int, bits: int = DEFAULT_BITS):
    _check_range(range_, bits)
    word_max = (1 << bits) - 1
    return word - word % range_ <= word_max - (range_ - 1)


def _read_word(src: ByteSource, width: int, mask: int) -> int:
    return int.from_bytes(src.next_bytes(width), "little") & mask


def sample_chrome(src: ByteSource, range_: int, bits: int = DEFAULT_BITS) -> int:
    bound = max_accepted(range_, bits)
    width, mask = (bits + 7) // 8, (1 << bits) - 1
    for _ in range(MAX_REJECTIONS):
        word = _read_word(src, width, mask)
        if word <= bound:
            return word % range_
    raise RejectionLimitExceeded(f"{MAX_REJECTIONS} consecutive rejections for range {range_}")


def sample_keepass(src: ByteSource, range_: int, bits: int = DEFAULT_BITS) -> int:
    _check_range(range_, bits)
    width, mask = (bits + 7) // 8, (1 << bits) - 1
    bound = mask - (range_ - 1)
    for _ in range(MAX_REJECTIONS):
        word = _read_word(src, width, mask)
        value = word % range_
        if word - value <= bound:
            return value
    raise RejectionLimitExceeded(f"{MAX_REJECTIONS} consecutive rejections for range {range_}")


_SAMPLERS = {"chrome": sample_chrome, "keepass": sample_keepass}


class SamplerChoiceSource:
    """ChoiceSource drawing through one of the rejection samplers."""

    def __init__(self, src: ByteSource, bits: int = DEFAULT_BITS, variant: str = "chrome"):
        _check_bits(bits)
        if variant not in _SAMPLERS:
            raise ValueError(f"unknown sampler variant {variant!r}")
        self.src = src
        self.bits = bits
        self.variant = variant
        self._sample = _SAMPLERS[variant]

    def choose(self, n: int) -> int:
        return self._sample(self.src, n, self.bits)


def make_choice_source(src: ByteSource, bits: int = DEFAULT_BITS, variant: str = "chrome") -> SamplerChoiceSource:
    return SamplerChoiceSource(src, bits, variant)


def system_choice_source(variant: str = "chrome") -> SamplerChoiceSource:
    return SamplerChoiceSource(SystemByteSource(), DEFAULT_BITS, variant)


def seeded_choice_source(seed: int, stream: int = 0, variant: str = "chrome") -> SamplerChoiceSource:
    return SamplerChoiceSource(SeededByteSource(seed, stream), DEFAULT_BITS, variant)


class ScriptedChoiceSource:
    """Returns scripted choices in order and records every requested range."""

    def __init__(self, choices: Iterable[int]):
        self._choices = list(choices)
        self._pos = 0
        self.requests: list[int] = []

    def choose(self, n: int) -> int:
        if self._pos >= len(self._choices):
            raise ScriptExhausted(f"no scripted choice left for choose({n})")
        value = self._choices[self._pos]
        if not 0 <= value < n:
            raise ValueError(f"scripted choice {value} out of range for choose({n})")
        self._pos += 1
        self.requests.append(n)
        return value

    @property
    def remaining(self) -> int:
        return len(self._choices) - self._pos
