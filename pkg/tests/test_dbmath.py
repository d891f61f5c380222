"""Unit-level dB arithmetic: power/level conversion and C/N cascades.

Expected values are frozen from hand calculations:
  10*log10(2)  = 3.010299956639812
  10*log10(30) = 14.771212547196624
  cascade_cnr(16, 10, 80, 36, 8):
    per-stage C/N = 80 - 36 - 8 - 10*log10(10) = 26
    10^(-1.6) + 10^(-2.6) = 0.027624308... -> 15.586073148417752 dB
"""

import math

import pytest
from hypothesis import given, strategies as st

from smatvplan.engine import (
    DBM_TO_DBUV_75_OHM,
    cascade_cnr,
    combine_cnr,
    level_to_power,
    power_to_level,
    sum_channel_power_dbm,
)

finite = st.floats(min_value=-200.0, max_value=200.0, allow_nan=False)


def test_zero_dbm_reference():
    assert DBM_TO_DBUV_75_OHM == 108.75
    assert power_to_level(0.0, 1) == 108.75
    assert level_to_power(108.75, 1) == 0.0


def test_power_to_level_frozen_values():
    assert power_to_level(0.0, 2) == pytest.approx(105.739700043360188, abs=1e-12)
    assert power_to_level(0.0, 30) == pytest.approx(93.978787452803376, abs=1e-12)


def test_power_level_round_trip():
    for p in (-30.0, -3.3, 0.0, 7.25):
        for n in (1, 2, 13, 40):
            assert level_to_power(power_to_level(p, n), n) == pytest.approx(p, abs=1e-12)


@pytest.mark.parametrize("n", [0, -1, 2.0, "2", None])
def test_channel_count_must_be_positive_int(n):
    with pytest.raises(ValueError):
        power_to_level(0.0, n)
    with pytest.raises(ValueError):
        level_to_power(100.0, n)


def test_sum_channel_power():
    assert sum_channel_power_dbm([108.75]) == pytest.approx(0.0, abs=1e-12)
    two = sum_channel_power_dbm([108.75, 108.75])
    assert two == pytest.approx(3.010299956639812, abs=1e-12)
    # n equal channels at power_to_level(0, n) sum to exactly 0 dBm
    for n in (2, 30, 40):
        u = power_to_level(0.0, n)
        assert sum_channel_power_dbm([u] * n) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        sum_channel_power_dbm([])


def test_cascade_cnr_frozen_value():
    assert cascade_cnr(16.0, 10, 80.0, 36.0, 8.0) == pytest.approx(
        15.586073148417752, abs=1e-12
    )


def test_cascade_cnr_without_stages_is_identity():
    assert cascade_cnr(16.0, 0, 80.0, 36.0, 8.0) == 16.0


def test_cascade_cnr_ideal_stages_change_nothing():
    # enormous drive level -> stage noise negligible
    assert cascade_cnr(16.0, 10, 1e6, 36.0, 8.0) == pytest.approx(16.0, abs=1e-9)


def test_cascade_matches_explicit_combine():
    # ten stages at 80 dBuV, K 36, NF 8: each contributes 36 dB C/N
    per_stage = 80.0 - 36.0 - 8.0
    assert per_stage == 36.0
    combined = combine_cnr([16.0] + [per_stage] * 10)
    assert combined == pytest.approx(cascade_cnr(16.0, 10, 80.0, 36.0, 8.0), abs=1e-12)
    # equivalently, one lump at per_stage - 10*log10(10) = 26
    assert combine_cnr([16.0, 26.0]) == pytest.approx(
        cascade_cnr(16.0, 10, 80.0, 36.0, 8.0), abs=1e-12
    )


def test_combine_cnr_basics():
    assert combine_cnr([17.5]) == pytest.approx(17.5, abs=1e-12)
    assert combine_cnr([None, 17.5, None]) == pytest.approx(17.5, abs=1e-12)
    assert combine_cnr([None, None]) is None
    assert combine_cnr([]) is None
    # two equal contributions cost exactly 3.01 dB
    assert combine_cnr([20.0, 20.0]) == pytest.approx(
        20.0 - 3.010299956639812, abs=1e-12
    )


@given(st.lists(finite, min_size=1, max_size=8), st.randoms())
def test_combine_cnr_permutation_invariant(values, rnd):
    shuffled = values[:]
    rnd.shuffle(shuffled)
    assert combine_cnr(shuffled) == pytest.approx(combine_cnr(values), abs=1e-9)


@given(st.lists(finite, min_size=1, max_size=8), finite)
def test_combine_cnr_never_improves(values, extra):
    base = combine_cnr(values)
    assert combine_cnr(values + [extra]) <= base + 1e-12
    assert base <= min(values) + 1e-12


@given(
    cn=st.floats(min_value=5.0, max_value=60.0),
    n=st.integers(min_value=1, max_value=20),
    u=st.floats(min_value=40.0, max_value=110.0),
    bump=st.floats(min_value=0.0, max_value=30.0),
)
def test_cascade_cnr_monotone_in_drive_level(cn, n, u, bump):
    k, nf = 36.0, 8.0
    low, high = cascade_cnr(cn, n, u, k, nf), cascade_cnr(cn, n, u + bump, k, nf)
    assert high >= low - 1e-12
    assert high <= cn + 1e-12


def test_cascade_cnr_rejects_bad_counts():
    with pytest.raises(ValueError):
        cascade_cnr(16.0, -1, 80.0, 36.0, 8.0)


def test_combined_power_of_known_plan():
    # 30 channels at 94.0 dBuV: within 0.03 dB of the 0 dBm budget
    total = sum_channel_power_dbm([94.0] * 30)
    assert total == pytest.approx(0.0, abs=0.03)
    assert math.isclose(
        sum_channel_power_dbm([70.0] * 4),
        70.0 + 10.0 * math.log10(4) - 108.75,
        abs_tol=1e-12,
    )
