import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ispi.scene import SceneMask, Trajectory, load_mask, make_letter_t, mask_at_time, save_mask, translate
from oracles import letter_t_pixels

LETTER_T_32_AREA = 182


def test_letter_t_32_area():
    t = make_letter_t(32, 32)
    assert t.mask.tolist() == letter_t_pixels(32, 32)
    assert t.transmitting == LETTER_T_32_AREA


def test_letter_t_8():
    img = make_letter_t(8, 8).as_image()
    rows = np.flatnonzero(img.any(axis=1))
    assert rows[0] == 3
    assert img[3].tolist() == [0, 1, 1, 1, 1, 1, 0, 0]
    assert img[5].tolist() == [0, 0, 0, 1, 1, 0, 0, 0]


@pytest.mark.parametrize("w,h", [(8, 8), (9, 17), (32, 32), (31, 20), (64, 48)])
def test_letter_t_matches_rule(w, h):
    assert make_letter_t(w, h).mask.tolist() == letter_t_pixels(w, h)


@pytest.mark.parametrize("w,h", [(7, 8), (8, 7)])
def test_letter_t_too_small(w, h):
    with pytest.raises(ValueError):
        make_letter_t(w, h)


def test_zero_time_is_identity():
    base = make_letter_t(32, 32)
    assert mask_at_time(base, Trajectory(), 0.0) == base


def test_diagonal_shift_rounds():
    traj = Trajectory(0.1, (-math.sqrt(2) / 2, -math.sqrt(2) / 2), 0.05, (0, 0))
    assert traj.shift_at(1.0) == (-1, -1)
    base = make_letter_t(32, 32)
    assert mask_at_time(base, traj, 1.0) == translate(base, -1, -1)


def test_shift_off_field():
    base = make_letter_t(32, 32)
    out = mask_at_time(base, Trajectory(10.0, (1.0, 0.0), 0.05), 1.0)
    assert out.transmitting == 0


def test_start_offset_applies():
    traj = Trajectory(0.0, (1.0, 0.0), 0.05, (2, -1))
    assert traj.shift_at(5.0) == (2, -1)


@pytest.mark.parametrize(
    "kwargs", [dict(speed=-1), dict(pixel_pitch=0), dict(direction=(1.0, 1.0))]
)
def test_bad_trajectory(kwargs):
    with pytest.raises(ValueError):
        Trajectory(**kwargs)


def test_negative_time():
    with pytest.raises(ValueError):
        mask_at_time(make_letter_t(8, 8), Trajectory(), -1.0)


@given(st.integers(-40, 40), st.integers(-40, 40))
def test_translation_never_adds_pixels(dx, dy):
    base = make_letter_t(32, 32)
    assert translate(base, dx, dy).transmitting <= base.transmitting


@given(st.integers(-2, 2), st.integers(-2, 2))
def test_translation_round_trip_interior(dx, dy):
    # 32x32 T sits >= 6 pixels from every border
    base = make_letter_t(32, 32)
    assert translate(translate(base, dx, dy), -dx, -dy) == base


def test_pgm_round_trip(tmp_path):
    base = make_letter_t(20, 12)
    path = save_mask(tmp_path / "t.pgm", base)
    assert load_mask(path) == base


def test_mask_validation():
    with pytest.raises(ValueError):
        SceneMask(2, 1, np.array([0, 2], dtype=np.int8))
    with pytest.raises(ValueError):
        SceneMask(2, 2, np.array([0, 1], dtype=np.int8))
