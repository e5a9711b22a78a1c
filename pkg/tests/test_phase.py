import math

import pytest
from hypothesis import given, strategies as st

from ccsim.phase import DyadicPhase


def test_from_level_angle():
    assert DyadicPhase.from_level(1, 1).radians == pytest.approx(math.pi)
    assert DyadicPhase.from_level(-1, 3).radians == pytest.approx(2 * math.pi - math.pi / 4)


@given(st.integers(0, 12))
def test_full_turn_sums_to_zero(k):
    step = DyadicPhase.from_level(1, k)
    total = DyadicPhase.zero()
    for _ in range(1 << k):
        total = total + step
    assert total.is_zero()


@given(st.integers(1, 62), st.sampled_from([1, -1]))
def test_sign_level_roundtrip(k, s):
    ph = DyadicPhase.from_level(s, k)
    if k == 1:
        assert ph.level == 1       # +pi and -pi coincide
    else:
        assert ph.sign_level() == (s, k)
    assert (ph + (-ph)).is_zero()


def test_exp_exact_on_quarter_turns():
    assert DyadicPhase.from_level(1, 2).exp() == 1j
    assert DyadicPhase.from_level(1, 1).exp() == -1
    assert DyadicPhase.from_level(-1, 2).exp() == -1j


def test_snap():
    assert DyadicPhase.snap(math.pi / 4) == DyadicPhase.from_level(1, 3)
    assert DyadicPhase.snap(-math.pi / 2) == DyadicPhase.from_level(-1, 2)
    assert DyadicPhase.snap(1.0) is None


def test_bad_arguments():
    with pytest.raises(ValueError):
        DyadicPhase.from_level(2, 3)
    with pytest.raises(ValueError):
        DyadicPhase.from_level(1, 63)
    with pytest.raises(ValueError):
        DyadicPhase(1, 62) + DyadicPhase(1, 10)
