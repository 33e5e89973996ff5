"""Bucket-detector forward model with additive optical background noise.

A measurement at tick ``n`` sees the pattern/object overlap scaled by the
detector gain, plus ambient light ``Q_n`` from a modulated LED, plus read
noise; the result is rounded and clamped to the ADC range.  Tick ``n``
happens at ``(n - 1) / dmd_rate`` seconds.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ispi._rng import DOMAIN_DETECTOR, DOMAIN_FLICKER, philox_words, to_unit
from ispi.patterns import Pattern
from ispi.scene import SceneMask

WAVEFORMS = ("off", "square", "sine", "ramp")


@dataclass(frozen=True)
class TimingSpec:
    dmd_rate: float = 20000.0

    def __post_init__(self):
        if not self.dmd_rate > 0:
            raise ValueError("dmd_rate must be positive")


@dataclass(frozen=True)
class DetectorModel:
    gain: float = 8.0
    read_noise_sigma: float = 1.0
    adc_bits: int = 12
    shot_noise: bool = False

    def __post_init__(self):
        if not self.gain > 0:
            raise ValueError("gain must be positive")
        if self.read_noise_sigma < 0:
            raise ValueError("read_noise_sigma must be non-negative")
        if not 1 <= self.adc_bits <= 16:
            raise ValueError("adc_bits must be in 1..16")

    @property
    def full_scale(self) -> int:
        return (1 << self.adc_bits) - 1


@dataclass(frozen=True)
class NoiseSpec:
    """LED background light.

    ``phase`` (radians) offsets the waveform; ``flicker_sigma`` adds
    zero-mean Gaussian fluctuation drawn from ``noise_seed``.
    """

    waveform: str = "off"
    frequency: float = 0.0
    amplitude: float = 0.0
    offset: float = 0.0
    noise_seed: int = 0
    phase: float = 0.0
    flicker_sigma: float = 0.0

    def __post_init__(self):
        if self.waveform not in WAVEFORMS:
            raise ValueError(f"unknown waveform {self.waveform!r}; expected one of {WAVEFORMS}")
        if self.amplitude < 0 or self.frequency < 0 or self.offset < 0 or self.flicker_sigma < 0:
            raise ValueError("amplitude, frequency, offset and flicker_sigma must be non-negative")


@dataclass(frozen=True)
class BucketSample:
    index: int
    value: int


def _check_dims(pattern: Pattern, mask: SceneMask):
    if (pattern.width, pattern.height) != (mask.width, mask.height):
        raise ValueError(
            f"pattern is {pattern.width}x{pattern.height} but mask is {mask.width}x{mask.height}"
        )


def overlap(pattern: Pattern, mask: SceneMask) -> int:
    """Number of pixels lit by ``pattern`` that the object transmits."""
    _check_dims(pattern, mask)
    return int(np.dot(pattern.bits.astype(np.int64), mask.mask.astype(np.int64)))


def _waveform(kind, cycles):
    frac = np.mod(cycles, 1.0)
    if kind == "square":
        return (frac >= 0.5).astype(np.float64)
    if kind == "sine":
        return 0.5 * (1.0 + np.sin(2.0 * np.pi * frac))
    if kind == "ramp":
        return frac
    raise ValueError(kind)


def noise_series(spec: NoiseSpec, timing: TimingSpec, start: int, count: int) -> np.ndarray:
    """``Q_n`` for ``n = start .. start+count-1``."""
    if start < 1:
        raise ValueError("measurement ordinal must be >= 1")
    if spec.waveform == "off":
        return np.zeros(count)
    ticks = np.arange(start - 1, start - 1 + count, dtype=np.float64)
    # phase advance counted in whole cycles so that f = rate/2 lands exactly on half-periods
    cycles = spec.frequency * ticks / timing.dmd_rate + spec.phase / (2.0 * math.pi)
    q = spec.offset + spec.amplitude * _waveform(spec.waveform, cycles)
    if spec.flicker_sigma > 0:
        w = philox_words(spec.noise_seed, DOMAIN_FLICKER, start - 1, count)
        q = q + spec.flicker_sigma * _box_muller(w)
    return q


def noise_sample(spec: NoiseSpec, timing: TimingSpec, n: int) -> float:
    return float(noise_series(spec, timing, n, 1)[0])


def _box_muller(words):
    u1 = to_unit(words[:, 0], open_low=True)
    u2 = to_unit(words[:, 1])
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def measure_block(
    bits: np.ndarray,
    mask: SceneMask,
    det: DetectorModel,
    q: np.ndarray,
    rng_seed: int,
    start: int,
):
    """Vectorised bucket readings for consecutive ticks.

    ``bits`` is (count, pixels); tick ``start + i`` uses row ``i`` and
    ``q[i]``.  Returns ``(values, optical)`` where ``optical`` is the
    noise-free mean ``gain * overlap``.  Each tick's noise depends only on
    ``(rng_seed, tick)``.
    """
    bits = np.atleast_2d(bits)
    count = bits.shape[0]
    if bits.shape[1] != mask.mask.size:
        raise ValueError(f"pattern has {bits.shape[1]} pixels but mask has {mask.mask.size}")
    q = np.broadcast_to(np.asarray(q, dtype=np.float64), (count,))
    ov = bits.astype(np.int64) @ mask.mask.astype(np.int64)
    optical = det.gain * ov.astype(np.float64)
    words = philox_words(rng_seed, DOMAIN_DETECTOR, start - 1, count)
    signal = optical
    if det.shot_noise:
        u = to_unit(words[:, 2], open_low=True)
        signal = stats.poisson.ppf(u, optical)
        signal = np.where(optical > 0, signal, 0.0)
    raw = signal + q
    if det.read_noise_sigma > 0:
        raw = raw + det.read_noise_sigma * _box_muller(words)
    values = np.clip(np.floor(raw + 0.5), 0, det.full_scale).astype(np.int64)
    return values, optical


def bucket_measure(
    pattern: Pattern,
    mask: SceneMask,
    det: DetectorModel,
    q: float,
    rng_seed: int,
    n: int,
) -> BucketSample:
    _check_dims(pattern, mask)
    values, _ = measure_block(pattern.bits[None, :], mask, det, q, rng_seed, n)
    return BucketSample(n, int(values[0]))


def slow_noise_ratio(S, Q) -> float:
    """mean|dQ| / mean|dS|; small values mean the background drifts slowly
    compared with the signal, which is when differencing cancels it."""
    S = np.asarray(S, dtype=np.float64)
    Q = np.asarray(Q, dtype=np.float64)
    if S.shape != Q.shape or S.ndim != 1:
        raise ValueError("S and Q must be 1-D series of equal length")
    if S.size < 2:
        raise ValueError("need at least two samples")
    num = np.mean(np.abs(np.diff(Q)))
    den = np.mean(np.abs(np.diff(S)))
    if num == 0:
        return 0.0
    if den == 0:
        return math.inf
    return float(num / den)


def write_trace_csv(path, S, Q, optical, first_index=1):
    """One row per measurement: ``n,S,Q,optical``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "S", "Q", "optical"])
        for i, (s, q, o) in enumerate(zip(S, Q, optical)):
            w.writerow([first_index + i, int(s), repr(float(q)), repr(float(o))])
