"""Throughput of the streaming reconstructor.

Only the ``IgiState.step`` loop is timed; patterns come from a small
pre-generated pool so generation cost stays out of the measurement.
"""

from __future__ import annotations

import time

import numpy as np

from ispi.patterns import PatternSpec, gen_patterns
from ispi.reconstruct import IgiState, Mode

POOL = 256


def time_steps(width, height, steps, mode="exact", seed=0, pool=POOL, repeats=1):
    """Seconds per ``step`` call, best of ``repeats``."""
    spec = PatternSpec(width, height, 0.5, seed)
    bits = gen_patterns(spec, 1, pool)
    rng = np.random.default_rng(seed)
    samples = rng.integers(0, 4096, size=pool).tolist()
    best = float("inf")
    for _ in range(repeats):
        state = IgiState(width, height, mode)
        step = state.step
        t0 = time.perf_counter()
        for i in range(steps):
            j = i % pool
            step(samples[j], bits[j])
        best = min(best, (time.perf_counter() - t0) / steps)
    return best


def _stepper(width, height, mode, seed, pool):
    spec = PatternSpec(width, height, 0.5, seed)
    bits = gen_patterns(spec, 1, pool)
    samples = np.random.default_rng(seed).integers(0, 4096, size=pool).tolist()
    state = IgiState(width, height, mode)
    step = state.step
    done = 0

    def run(count):
        nonlocal done
        t0 = time.perf_counter()
        for i in range(done, done + count):
            j = i % pool
            step(samples[j], bits[j])
        done += count
        return (time.perf_counter() - t0) / count

    return run


def length_scaling(width, height, short_steps, long_steps, mode="exact", seed=0, pool=POOL):
    """Per-step cost of fresh ``short_steps`` runs vs. ``short_steps`` slices
    of one ``long_steps`` stream, interleaved so machine drift hits both.

    Returns ``(short, long, long_total)``: best per-step cost of each kind
    (interference only ever adds time) and the mean over the whole long run.
    """
    long_run = _stepper(width, height, mode, seed, pool)
    shorts, longs = [], []
    done = 0
    while done < long_steps:
        count = min(short_steps, long_steps - done)
        shorts.append(_stepper(width, height, mode, seed + 1, pool)(short_steps))
        longs.append(long_run(count))
        done += count
    total = float(np.average(longs, weights=[min(short_steps, long_steps - i * short_steps) for i in range(len(longs))]))
    return min(shorts), min(longs), total


def bench(config=None, short_steps=10_000, long_steps=100_000, scale_size=(128, 128), scale_steps=500):
    """Per-step cost at two stream lengths and at two image sizes.

    Returns a flat dict: ``steps_per_s`` is the sustained rate over the whole
    long run; ``length_ratio`` compares per-step cost at the two stream lengths
    (1.0 means O(1) per step regardless of history); ``pixel_ratio`` is the
    cost ratio when the pixel count doubles.
    """
    if config is not None:
        width, height = config.pattern.width, config.pattern.height
        mode = config.mode
        dmd_rate = config.timing.dmd_rate
    else:
        width, height, mode, dmd_rate = 32, 32, Mode(), 20000.0
    mode = Mode.parse(mode)
    time_steps(width, height, min(short_steps, 2000), mode)  # warm caches and allocator
    short, long, sustained = length_scaling(width, height, short_steps, long_steps, mode)
    sw, sh = scale_size
    # interleaved so slow drift of the machine hits both sizes alike
    small = large = float("inf")
    for _ in range(5):
        small = min(small, time_steps(sw, sh, scale_steps, mode))
        large = min(large, time_steps(sw, 2 * sh, scale_steps, mode))
    return {
        "width": width,
        "height": height,
        "mode": str(mode),
        "dmd_rate": dmd_rate,
        "short_steps": short_steps,
        "long_steps": long_steps,
        "step_s_short": short,
        "step_s_long": long,
        "steps_per_s": 1.0 / sustained,
        "realtime_margin": (1.0 / sustained) / dmd_rate,
        "length_ratio": long / short,
        "scale_pixels": [sw * sh, sw * sh * 2],
        "step_s_scale": [small, large],
        "pixel_ratio": large / small,
    }
