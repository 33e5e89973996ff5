"""Random binary illumination patterns, as projected by the simulated DMD.

Pattern ``n`` of a stream is a pure function of ``(seed, n)``: its pixels are
read from a fixed window of a counter-based generator, so patterns can be
regenerated in any order and in parallel without replaying the sequence.
Pixels are indexed row-major, ``x = row * width + col``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ispi._rng import DOMAIN_PATTERN, philox_words, to_unit


@dataclass(frozen=True)
class PatternSpec:
    width: int = 32
    height: int = 32
    fill_probability: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"pattern dimensions must be >= 1, got {self.width}x{self.height}")
        if not 0.0 <= self.fill_probability <= 1.0:
            raise ValueError(f"fill_probability must lie in [0, 1], got {self.fill_probability}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def size(self) -> int:
        return self.width * self.height

    @property
    def blocks_per_pattern(self) -> int:
        # one Philox block yields four 64-bit words
        return -(-self.size // 4)


@dataclass(frozen=True, eq=False)
class Pattern:
    """One binary frame ``I_n(x)``; ``bits`` is a flat int8 array of 0/1."""

    index: int
    width: int
    height: int
    bits: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, Pattern):
            return NotImplemented
        return (
            self.index == other.index
            and self.width == other.width
            and self.height == other.height
            and np.array_equal(self.bits, other.bits)
        )

    def as_image(self) -> np.ndarray:
        return self.bits.reshape(self.height, self.width)


@dataclass(frozen=True, eq=False)
class DiffPattern:
    """Element-wise difference of two consecutive patterns, values in {-1, 0, 1}."""

    width: int
    height: int
    values: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, DiffPattern):
            return NotImplemented
        return (self.width, self.height) == (other.width, other.height) and np.array_equal(
            self.values, other.values
        )

    def __neg__(self):
        return DiffPattern(self.width, self.height, -self.values)


def gen_patterns(spec: PatternSpec, start: int, count: int) -> np.ndarray:
    """Bits of patterns ``start .. start+count-1`` as a (count, pixels) int8 array.

    Row ``i`` equals ``gen_pattern(spec, start + i).bits``.
    """
    if start < 1:
        raise ValueError(f"pattern ordinal must be >= 1, got {start}")
    if count < 0:
        raise ValueError("count must be non-negative")
    bpp = spec.blocks_per_pattern
    words = philox_words(spec.seed, DOMAIN_PATTERN, (start - 1) * bpp, count * bpp)
    words = words.reshape(count, bpp * 4)[:, : spec.size]
    return (to_unit(words) < spec.fill_probability).astype(np.int8)


def gen_pattern(spec: PatternSpec, n: int) -> Pattern:
    """Return the ``n``-th (1-based) pattern of the stream described by ``spec``."""
    bits = gen_patterns(spec, n, 1)[0]
    return Pattern(n, spec.width, spec.height, bits)


def pattern_diff(a: Pattern, b: Pattern) -> DiffPattern:
    """``b - a`` pixel by pixel."""
    if (a.width, a.height) != (b.width, b.height):
        raise ValueError(
            f"pattern dimensions differ: {a.width}x{a.height} vs {b.width}x{b.height}"
        )
    values = b.bits.astype(np.int8) - a.bits.astype(np.int8)
    return DiffPattern(a.width, a.height, values)


def from_bits(bits, width, height, index=1) -> Pattern:
    """Build a Pattern from an explicit 0/1 sequence (handy for hand-made cases)."""
    arr = np.asarray(bits, dtype=np.int8).ravel()
    if arr.size != width * height:
        raise ValueError(f"expected {width * height} bits, got {arr.size}")
    if np.any((arr != 0) & (arr != 1)):
        raise ValueError("pattern bits must be 0 or 1")
    return Pattern(index, width, height, arr)


def dump_patterns(spec: PatternSpec, start: int, count: int, directory) -> list:
    """Write patterns as ``pattern_%06u.pgm`` (0 -> 0, 1 -> 255) for inspection."""
    from pathlib import Path

    from ispi.pnm import write_pgm

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, row in enumerate(gen_patterns(spec, start, count)):
        img = row.reshape(spec.height, spec.width).astype(np.uint8) * 255
        paths.append(write_pgm(directory / f"pattern_{start + i:06d}.pgm", img))
    return paths
