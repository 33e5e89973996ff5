from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ispi.forward import BucketSample
from ispi.patterns import PatternSpec, from_bits, gen_pattern, gen_patterns
from ispi.reconstruct import IgiState, Mode, cgi_reconstruct, frame_split, igi_finalize, igi_init, igi_step
from oracles import cgi_direct, igi_direct, igi_direct_exact


def feed(state, samples, patterns):
    for s, p in zip(samples, patterns):
        igi_step(state, BucketSample(0, s), p)
    return state


def pats(rows, w=None):
    w = w or len(rows[0])
    return [from_bits(r, w, len(r) // w, i + 1) for i, r in enumerate(rows)]


def test_init():
    st_ = igi_init(32, 32, "exact")
    assert st_.acc.tolist() == [0] * 1024 and st_.pairs_count == 0
    assert st_.prev_pattern is None
    one = igi_init(1, 1, "fixed(16)")
    assert one.acc.tolist() == [0] and one.mode == Mode("fixed", 16)
    with pytest.raises(ValueError):
        igi_init(0, 5)


def test_identical_patterns_give_zero():
    s = feed(igi_init(2, 1), [3, 9], pats([[1, 0], [1, 0]]))
    assert s.acc.tolist() == [0, 0] and s.pairs_count == 1


def test_identical_samples_give_zero():
    s = feed(igi_init(2, 1), [4, 4], pats([[1, 0], [0, 1]]))
    assert s.acc.tolist() == [0, 0]


def test_single_term():
    s = feed(igi_init(2, 1), [3, 5], pats([[0, 1], [1, 0]]))
    assert s.acc.tolist() == [2, -2] and s.pairs_count == 1
    assert igi_finalize(s).values.tolist() == [1.0, -1.0]


def test_first_step_only_stores():
    s = feed(igi_init(2, 1), [3], pats([[0, 1]]))
    assert s.pairs_count == 0 and s.consumed == 1
    assert s.prev_pattern.bits.tolist() == [0, 1] and s.prev_sample == 3
    with pytest.raises(ValueError):
        igi_finalize(s)


def test_four_measurement_hand_example():
    samples = [1, 2, 2, 4]
    rows = [[0, 1], [1, 1], [1, 0], [0, 0]]
    acc, den = igi_direct(samples, rows)
    assert acc == [-1, 0] and den == 6
    img = igi_finalize(feed(igi_init(2, 1), samples, pats(rows)))
    assert img.exact_values() == [Fraction(-1, 6), Fraction(0)]
    assert img.values.tolist() == [-1 / 6, 0.0]


def test_finalize_does_not_mutate():
    s = feed(igi_init(2, 1), [3, 5], pats([[0, 1], [1, 0]]))
    igi_finalize(s)
    feed(s, [1], pats([[1, 1]]))
    assert s.pairs_count == 2
    assert s.acc.tolist() == [2, -2 + (1 - 5) * (1 - 0)]


def test_step_dimension_mismatch():
    with pytest.raises(ValueError):
        igi_step(igi_init(2, 1), 3, from_bits([1, 0, 1], 3, 1))


def test_fixed8_saturates():
    s = igi_init(1, 1, "fixed(8)")
    s.acc[0] = 120
    s.has_prev = True
    s.prev_sample = 0
    s.prev_bits[0] = 0
    igi_step(s, 20, from_bits([1], 1, 1))
    assert s.acc[0] == 127 and s.saturated and s.saturation_events == 1


def test_fixed_negative_saturation():
    s = igi_init(1, 1, "fixed(8)")
    feed(s, [0, 200], pats([[1], [0]]))
    assert s.acc[0] == -128 and s.saturated


def test_fixed_wide_matches_exact_without_overflow():
    spec = PatternSpec(6, 6, 0.5, 2)
    bits = gen_patterns(spec, 1, 300)
    samples = np.random.default_rng(0).integers(0, 4096, 300)
    a = IgiState(6, 6, "exact").feed(samples, bits)
    b = IgiState(6, 6, "fixed(32)").feed(samples, bits)
    assert np.array_equal(a.acc, b.acc) and not b.saturated


@pytest.mark.parametrize("text,mode", [("exact", Mode()), ("fixed(32)", Mode("fixed", 32)), ("FIXED8", Mode("fixed", 8))])
def test_mode_parse(text, mode):
    assert Mode.parse(text) == mode
    assert Mode.parse(str(mode)) == mode


@pytest.mark.parametrize("text", ["fixed", "fixed(1)", "fixed(64)", "float"])
def test_mode_parse_errors(text):
    with pytest.raises(ValueError):
        Mode.parse(text)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 5),
    st.integers(1, 5),
    st.integers(2, 30),
    st.integers(0, 2**32),
)
def test_streaming_equals_direct(w, h, n, seed):
    rng = np.random.default_rng(seed)
    rows = rng.integers(0, 2, (n, w * h)).tolist()
    samples = rng.integers(0, 4096, n).tolist()
    img = igi_finalize(feed(igi_init(w, h), samples, pats(rows, w)))
    assert img.exact_values() == igi_direct_exact(samples, rows)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 50))
def test_scale_covariance(seed, c):
    rng = np.random.default_rng(seed)
    rows = rng.integers(0, 2, (20, 6))
    samples = rng.integers(0, 1000, 20)
    a = IgiState(3, 2).feed(samples, rows.astype(np.int8))
    b = IgiState(3, 2).feed(samples * c, rows.astype(np.int8))
    assert np.array_equal(b.finalize().numerator, c * a.finalize().numerator)
    assert b.finalize().exact_values() == [c * v for v in a.finalize().exact_values()]


def test_state_size_constant():
    s = IgiState(4, 4)
    before = s.state_size()
    bits = gen_patterns(PatternSpec(4, 4, 0.5, 0), 1, 500)
    s.feed(np.arange(500) % 7, bits)
    assert s.state_size() == before == 16 + 16 * 8 + 40


def test_cgi_examples():
    img = cgi_reconstruct([1, 3], pats([[0, 1], [1, 1]]))
    assert img.values.tolist() == [0.5, 0.0]
    assert not cgi_reconstruct([5, 5, 5], pats([[0, 1], [1, 1], [1, 0]])).values.any()
    assert not cgi_reconstruct([1, 4, 2], pats([[0, 1], [0, 1], [0, 1]])).values.any()


def test_cgi_errors():
    with pytest.raises(ValueError):
        cgi_reconstruct([1], pats([[0, 1]]))
    with pytest.raises(ValueError):
        cgi_reconstruct([1, 2, 3], pats([[0, 1], [1, 1]]))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 25), st.integers(0, 2**32))
def test_cgi_matches_direct(n, seed):
    rng = np.random.default_rng(seed)
    rows = rng.integers(0, 2, (n, 4)).tolist()
    samples = rng.integers(0, 4096, n).tolist()
    got = cgi_reconstruct(samples, pats(rows, 2)).values
    want = [float(v) for v in cgi_direct(samples, rows)]
    np.testing.assert_allclose(got, want, rtol=1e-9, atol=1e-9)


def test_cgi_array_input():
    bits = gen_patterns(PatternSpec(3, 2, 0.5, 1), 1, 10)
    s = np.arange(10)
    img = cgi_reconstruct(s, bits, 3, 2)
    assert (img.width, img.height) == (3, 2)
    ref = cgi_reconstruct(s, [gen_pattern(PatternSpec(3, 2, 0.5, 1), i) for i in range(1, 11)])
    assert np.array_equal(img.values, ref.values)


def _stream(count, spec):
    rng = np.random.default_rng(0)
    samples = rng.integers(0, 4096, count).tolist()
    return [(s, gen_pattern(spec, i + 1)) for i, s in enumerate(samples)]


def test_frame_split_boundary_sharing():
    spec = PatternSpec(3, 3, 0.5, 4)
    stream = _stream(1601, spec)
    frames = list(frame_split(iter(stream), 800))
    assert len(frames) == 2
    assert [f.pairs_count for f in frames] == [800, 800]
    # frame 2 = measurements 801..1601 (801 shared with frame 1)
    s = [x for x, _ in stream]
    rows = [p.bits.tolist() for _, p in stream]
    assert frames[1].acc.tolist() == igi_direct(s[800:1601], rows[800:1601])[0]
    assert frames[0].acc.tolist() == igi_direct(s[:801], rows[:801])[0]
    assert len(list(frame_split(iter(stream[:1600]), 800))) == 1


def test_frame_split_minimal():
    spec = PatternSpec(2, 1, 0.5, 4)
    stream = _stream(5, spec)
    frames = list(frame_split(stream, 2))
    assert len(frames) == 2 and all(f.pairs_count == 2 for f in frames)
    with pytest.raises(ValueError):
        list(frame_split(stream, 1))


def test_expectation_small_enumeration():
    # every length-3 sequence of 1-pixel patterns, S = I
    total = Fraction(0)
    for seq in product([0, 1], repeat=3):
        total += igi_direct_exact(list(seq), [[b] for b in seq])[0]
    assert total / 8 == Fraction(1, 4)  # Var of Bernoulli(1/2)
