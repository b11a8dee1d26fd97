from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from linksim.correlation import (
    aperiodic_ccf,
    periodic_acf,
    periodic_acf_profile,
    periodic_ccf,
    periodic_ccf_profile,
)
from linksim.pn_codes import generate_msequence, primitive_polynomials, to_bipolar

chip_seqs = st.integers(1, 24).flatmap(
    lambda n: st.tuples(st.lists(st.sampled_from([-1, 1]), min_size=n, max_size=n),
                        st.lists(st.sampled_from([-1, 1]), min_size=n, max_size=n)))


def test_acf_period7(mseq7):
    assert periodic_acf(mseq7, 0) == 7
    assert [periodic_acf(mseq7, lag) for lag in range(1, 7)] == [-1] * 6
    assert periodic_ccf(mseq7, mseq7, 3) == -1


def test_acf_period31():
    x = to_bipolar(generate_msequence("x^5+x^2+1"))
    assert periodic_acf(x, 0) == 31
    assert all(periodic_acf(x, lag) == -1 for lag in range(1, 31))


def test_distinct_shifts_lag0(mseq7):
    assert periodic_ccf(mseq7, np.roll(mseq7, -2), 0) == -1


@pytest.mark.parametrize("degree", range(3, 11))
def test_two_valued_acf_exhaustive(degree):
    for poly in primitive_polynomials(degree):
        prof = periodic_acf_profile(to_bipolar(generate_msequence(poly)))
        assert prof.raw[0] == 2**degree - 1
        assert set(prof.raw[1:]) == {-1}


def test_mismatched_periods():
    with pytest.raises(ValueError):
        periodic_ccf([1, -1, 1], [1, -1], 0)


def test_aperiodic(mseq7):
    assert aperiodic_ccf(mseq7, mseq7, 0) == 7
    assert aperiodic_ccf(mseq7, mseq7, 7) == 0
    assert aperiodic_ccf(mseq7, mseq7, -7) == 0
    # 1001011 against itself shifted by 2: hand sum over the 5-chip overlap
    assert aperiodic_ccf(mseq7, mseq7, 2) == int(np.dot(mseq7[:5], mseq7[2:]))
    assert aperiodic_ccf(mseq7, mseq7, 2) == -1


@given(chip_seqs, st.integers(-30, 30))
def test_ccf_symmetry(xy, lag):
    x, y = xy
    n = len(x)
    assert periodic_ccf(x, y, lag) == periodic_ccf(y, x, (-lag) % n)
    assert periodic_ccf(x, y, lag) == periodic_ccf(x, y, lag + n)
    assert abs(periodic_ccf(x, y, lag)) <= n


@given(chip_seqs, st.integers(-30, 30))
def test_aperiodic_bounded_by_overlap(xy, lag):
    x, y = xy
    overlap = max(0, len(x) - abs(lag))
    assert abs(aperiodic_ccf(x, y, lag)) <= overlap


@given(chip_seqs)
def test_profile_normalization(xy):
    x, y = xy
    prof = periodic_ccf_profile(x, y)
    assert list(prof.lags) == list(range(len(x)))
    assert all(nv == Fraction(r, len(x)) for nv, r in zip(prof.normalized, prof.raw))
    assert periodic_acf_profile(x).normalized[0] == 1
