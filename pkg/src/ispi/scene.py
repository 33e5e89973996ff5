"""The imaged object: a binary transmission mask and its rigid motion."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ispi.pnm import read_pgm, write_pgm

DEFAULT_PIXEL_PITCH = 0.05  # mm/pixel: 0.8 mm letter over 16 pixels


@dataclass(frozen=True, eq=False)
class SceneMask:
    """Row-major 0/1 transmission map (1 transmits)."""

    width: int
    height: int
    mask: np.ndarray

    def __post_init__(self):
        if self.mask.size != self.width * self.height:
            raise ValueError("mask length does not match its dimensions")
        if np.any((self.mask != 0) & (self.mask != 1)):
            raise ValueError("mask elements must be 0 or 1")

    def __eq__(self, other):
        if not isinstance(other, SceneMask):
            return NotImplemented
        return (self.width, self.height) == (other.width, other.height) and np.array_equal(
            self.mask, other.mask
        )

    @property
    def transmitting(self) -> int:
        return int(self.mask.sum())

    def as_image(self) -> np.ndarray:
        return self.mask.reshape(self.height, self.width)

    @classmethod
    def from_image(cls, img) -> "SceneMask":
        img = np.asarray(img)
        h, w = img.shape
        return cls(w, h, (img.ravel() != 0).astype(np.int8))


@dataclass(frozen=True)
class Trajectory:
    """Straight-line motion.  ``direction`` is (dx, dy) in pixel axes, with
    +x to the right and +y downward, so (-1, -1)/sqrt(2) heads to the upper
    left."""

    speed: float = 0.1
    direction: tuple = (-math.sqrt(0.5), -math.sqrt(0.5))
    pixel_pitch: float = DEFAULT_PIXEL_PITCH
    start_offset: tuple = (0, 0)

    def __post_init__(self):
        if self.speed < 0:
            raise ValueError("speed must be non-negative")
        if self.pixel_pitch <= 0:
            raise ValueError("pixel_pitch must be positive")
        if abs(math.hypot(*self.direction) - 1.0) > 1e-9:
            raise ValueError(f"direction must have unit norm, got {self.direction}")

    def shift_at(self, t: float) -> tuple[int, int]:
        """Integer pixel shift (dx, dy) at time ``t`` seconds."""
        if t < 0:
            raise ValueError("time must be non-negative")
        travel = self.speed * t / self.pixel_pitch
        dx = _round_half_away(travel * self.direction[0]) + int(self.start_offset[0])
        dy = _round_half_away(travel * self.direction[1]) + int(self.start_offset[1])
        return dx, dy


def _round_half_away(v: float) -> int:
    return int(math.copysign(math.floor(abs(v) + 0.5), v))


def make_letter_t(width: int = 32, height: int = 32) -> SceneMask:
    """Centered block-letter T.

    The bar covers the middle 60% of the width and is ``ceil(height/5)`` rows
    thick, with its top row at ``(height - thickness) // 2``.  The stem is
    ``ceil(width/5)`` columns wide, horizontally centered, and runs from under
    the bar down to row ``ceil(0.8 * height) - 1``.
    """
    if width < 8 or height < 8:
        raise ValueError(f"letter T needs at least 8x8 pixels, got {width}x{height}")
    img = np.zeros((height, width), dtype=np.int8)
    bar_h = -(-height // 5)
    bar_w = (6 * width + 5) // 10
    top = (height - bar_h) // 2
    left = (width - bar_w) // 2
    img[top : top + bar_h, left : left + bar_w] = 1

    stem_w = -(-width // 5)
    stem_left = (width - stem_w) // 2
    stem_end = max(top + bar_h + 1, -(-4 * height // 5))
    img[top + bar_h : stem_end, stem_left : stem_left + stem_w] = 1
    return SceneMask(width, height, img.ravel())


def translate(base: SceneMask, dx: int, dy: int) -> SceneMask:
    """Shift by (dx, dy) pixels, dropping what leaves the field."""
    src = base.as_image()
    out = np.zeros_like(src)
    h, w = src.shape
    if abs(dx) < w and abs(dy) < h:
        ys, yd = (slice(0, h - dy), slice(dy, h)) if dy >= 0 else (slice(-dy, h), slice(0, h + dy))
        xs, xd = (slice(0, w - dx), slice(dx, w)) if dx >= 0 else (slice(-dx, w), slice(0, w + dx))
        out[yd, xd] = src[ys, xs]
    return SceneMask(w, h, out.ravel())


def mask_at_time(base: SceneMask, traj: Trajectory, t: float) -> SceneMask:
    dx, dy = traj.shift_at(t)
    return translate(base, dx, dy)


def load_mask(path) -> SceneMask:
    """Read a PGM; pixels above mid-gray transmit."""
    img = read_pgm(path)
    return SceneMask.from_image(img > 127)


def save_mask(path, scene: SceneMask):
    return write_pgm(path, scene.as_image().astype(np.uint8) * 255)
