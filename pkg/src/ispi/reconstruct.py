"""Streaming instant-ghost-imaging reconstruction and the batch CGI reference.

The streaming reconstructor keeps exactly what the on-chip pipeline keeps: the
previous pattern, the previous bucket value, one accumulator image and a few
counters.  Each new measurement adds ``(S_n - S_{n-1}) * (I_n - I_{n-1})`` to
the accumulator and then overwrites the stored pattern and sample.  The
accumulator is integer-valued; the ``1 / (2 * pairs)`` scale is applied only
when an image is read out.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

from ispi.forward import BucketSample
from ispi.patterns import Pattern

_FIXED_RE = re.compile(r"^fixed\(?(\d+)\)?$")


@dataclass(frozen=True)
class Mode:
    """Accumulator arithmetic: ``exact`` (int64) or ``fixed`` W-bit saturating."""

    kind: str = "exact"
    bits: int | None = None

    def __post_init__(self):
        if self.kind == "exact":
            if self.bits is not None:
                raise ValueError("exact mode takes no bit width")
        elif self.kind == "fixed":
            if self.bits is None or not 2 <= self.bits <= 63:
                raise ValueError("fixed mode needs a bit width in 2..63")
        else:
            raise ValueError(f"unknown mode {self.kind!r}")

    @classmethod
    def parse(cls, text) -> "Mode":
        if isinstance(text, Mode):
            return text
        s = str(text).strip().lower()
        if s == "exact":
            return cls("exact")
        m = _FIXED_RE.match(s)
        if m is None:
            raise ValueError(f"cannot parse mode {text!r}; use 'exact' or 'fixed(W)'")
        return cls("fixed", int(m.group(1)))

    @property
    def limits(self) -> tuple[int, int] | None:
        if self.kind == "exact":
            return None
        return -(1 << (self.bits - 1)), (1 << (self.bits - 1)) - 1

    def __str__(self):
        return "exact" if self.kind == "exact" else f"fixed({self.bits})"


@dataclass(frozen=True, eq=False)
class ReconImage:
    """Reconstructed image.  When produced by the streaming reconstructor,
    ``numerator / denominator`` holds the exact value of every pixel."""

    width: int
    height: int
    values: np.ndarray
    numerator: np.ndarray | None = None
    denominator: int | None = None

    def __post_init__(self):
        if self.values.size != self.width * self.height:
            raise ValueError("image length does not match its dimensions")

    def as_image(self) -> np.ndarray:
        return self.values.reshape(self.height, self.width)

    def exact_values(self) -> list[Fraction]:
        if self.numerator is None:
            raise ValueError("image carries no exact representation")
        return [Fraction(int(a), self.denominator) for a in self.numerator]


class IgiState:
    """Bounded-memory state of one streaming IGI reconstruction.

    Single owner: advance it from one place at a time.  ``step`` mutates in
    place and returns ``self``.
    """

    __slots__ = (
        "width",
        "height",
        "mode",
        "acc",
        "prev_bits",
        "prev_sample",
        "has_prev",
        "pairs_count",
        "consumed",
        "saturated",
        "saturation_events",
        "_diff",
        "_inc",
    )

    def __init__(self, width: int, height: int, mode: Mode | str = "exact"):
        if width < 1 or height < 1:
            raise ValueError(f"image dimensions must be >= 1, got {width}x{height}")
        self.width = width
        self.height = height
        self.mode = Mode.parse(mode)
        n = width * height
        self.acc = np.zeros(n, dtype=np.int64)
        self.prev_bits = np.zeros(n, dtype=np.int8)
        self.prev_sample = 0
        self.has_prev = False
        self.pairs_count = 0
        self.consumed = 0
        self.saturated = False
        self.saturation_events = 0
        # scratch buffers, preallocated so stepping never allocates
        self._diff = np.zeros(n, dtype=np.int64)
        self._inc = np.zeros(n, dtype=np.int64)

    @property
    def prev_pattern(self) -> Pattern | None:
        if not self.has_prev:
            return None
        return Pattern(self.consumed, self.width, self.height, self.prev_bits.copy())

    def state_size(self) -> int:
        """Bytes of reconstruction state: one pattern, one accumulator image,
        and fixed-width scalars (previous sample, counters, saturation flag)."""
        return self.prev_bits.nbytes + self.acc.nbytes + 5 * 8

    def step(self, sample, bits) -> "IgiState":
        """Consume one measurement given as a bucket value and 0/1 pixel array."""
        s = int(sample)
        if bits.shape != self.prev_bits.shape:
            raise ValueError(
                f"pattern has {bits.size} pixels, state expects {self.prev_bits.size}"
            )
        if self.has_prev:
            ds = s - self.prev_sample
            if ds != 0:
                np.subtract(bits, self.prev_bits, out=self._diff, dtype=np.int64)
                np.multiply(self._diff, ds, out=self._inc)
                if self.mode.kind == "exact":
                    self.acc += self._inc
                else:
                    self._accumulate_saturating()
            self.pairs_count += 1
        self.prev_bits[:] = bits
        self.prev_sample = s
        self.has_prev = True
        self.consumed += 1
        return self

    def _accumulate_saturating(self):
        lo, hi = self.mode.limits
        self._inc += self.acc
        over = (self._inc > hi) | (self._inc < lo)
        hits = int(np.count_nonzero(over))
        if hits:
            self.saturated = True
            self.saturation_events += hits
            np.clip(self._inc, lo, hi, out=self._inc)
        self.acc[:] = self._inc

    def feed(self, samples, bits2d) -> "IgiState":
        """Step through aligned arrays of samples and pattern rows."""
        for s, row in zip(np.asarray(samples).tolist(), bits2d):
            self.step(s, row)
        return self

    def finalize(self) -> ReconImage:
        if self.pairs_count < 1:
            raise ValueError("no difference terms accumulated yet")
        den = 2 * self.pairs_count
        num = self.acc.copy()
        return ReconImage(self.width, self.height, num / den, num, den)

    def __repr__(self):
        return (
            f"IgiState({self.width}x{self.height}, mode={self.mode}, "
            f"pairs={self.pairs_count}, saturated={self.saturated})"
        )


def igi_init(width: int, height: int, mode: Mode | str = "exact") -> IgiState:
    return IgiState(width, height, mode)


def igi_step(state: IgiState, sample, pattern: Pattern) -> IgiState:
    if (pattern.width, pattern.height) != (state.width, state.height):
        raise ValueError(
            f"pattern is {pattern.width}x{pattern.height}, state is {state.width}x{state.height}"
        )
    value = sample.value if isinstance(sample, BucketSample) else sample
    return state.step(value, pattern.bits)


def igi_finalize(state: IgiState) -> ReconImage:
    """Image readout ``acc / (2 * pairs)``; the state is left untouched so
    streaming may continue."""
    return state.finalize()


def _as_arrays(samples, patterns):
    s = np.asarray(
        [x.value if isinstance(x, BucketSample) else x for x in samples], dtype=np.float64
    )
    if isinstance(patterns, np.ndarray):
        bits = patterns
        width = height = None
    else:
        patterns = list(patterns)
        if not patterns:
            raise ValueError("no patterns given")
        dims = {(p.width, p.height) for p in patterns}
        if len(dims) != 1:
            raise ValueError("patterns have differing dimensions")
        (width, height), = dims
        bits = np.stack([p.bits for p in patterns])
    return s, bits, width, height


def cgi_reconstruct(samples, patterns, width=None, height=None) -> ReconImage:
    """Background-subtracted correlation ``<(S - <S>)(I - <I>)>`` over the whole batch.

    ``patterns`` is a sequence of :class:`Pattern` or a (N, pixels) array, in
    which case ``width``/``height`` give the image shape (default: one row).
    """
    s, bits, w, h = _as_arrays(samples, patterns)
    if s.size != bits.shape[0]:
        raise ValueError(f"{s.size} samples but {bits.shape[0]} patterns")
    if s.size < 2:
        raise ValueError("need at least two measurements")
    width = w if w is not None else (width or bits.shape[1])
    height = h if h is not None else (height or 1)
    n = s.size
    ds = s - s.mean()
    di = bits - bits.mean(axis=0, dtype=np.float64)
    values = ds @ di / n
    return ReconImage(width, height, values)


def frame_split(stream: Iterable, n: int, mode: Mode | str = "exact") -> Iterator[IgiState]:
    """Cut a continuous measurement stream into frames of ``n`` fresh measurements.

    ``stream`` yields ``(sample, pattern)`` pairs.  The first measurement only
    primes the reconstructor; afterwards the last measurement of frame ``k``
    also opens frame ``k + 1``, so every frame holds ``n`` difference terms
    and frames arrive at exactly ``dmd_rate / n``.  A trailing partial frame
    is dropped.
    """
    if n < 2:
        raise ValueError("frames need at least two measurements")
    mode = Mode.parse(mode)
    state = None
    fresh = 0
    for sample, pattern in stream:
        if state is None:
            state = IgiState(pattern.width, pattern.height, mode)
            igi_step(state, sample, pattern)
            continue
        igi_step(state, sample, pattern)
        fresh += 1
        if fresh == n:
            yield state
            state = IgiState(pattern.width, pattern.height, mode)
            igi_step(state, sample, pattern)
            fresh = 0
