import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fujita_lab.special_kernels import bessel_i, log_bessel_i_scaled
from fujita_lab.special_kernels.bessel import crossover, log_iv_asymptotic, log_iv_series

mpmath.mp.dps = 40


def mp_log_ive(nu, x):
    return float(mpmath.log(mpmath.besseli(nu, x)) - x)


@pytest.mark.parametrize("nu", [0.0, 0.25, 0.5, 1.0, 1.8, 3.5, 10.0])
@pytest.mark.parametrize("x", [1e-8, 0.3, 2.0, 9.9, 10.1, 40.0, 300.0, 1e5])
def test_against_mpmath(nu, x):
    got = log_bessel_i_scaled(nu, x)
    ref = mp_log_ive(nu, x)
    assert got == pytest.approx(ref, abs=1e-13 * max(1.0, abs(ref)))


def test_half_order_closed_form():
    x = np.array([0.1, 1.0, 10.0, 50.0])
    assert np.allclose(bessel_i(0.5, x), np.sqrt(2 / (np.pi * x)) * np.sinh(x), rtol=1e-13)


def test_series_and_asymptotic_meet_at_crossover():
    for nu in (0.0, 0.5, 1.5, 3.0, 6.0):
        x = crossover(nu)
        a = log_iv_series(nu, x)
        b = log_iv_asymptotic(nu, x)
        assert a == pytest.approx(b, abs=1e-13)


def test_large_argument_does_not_overflow():
    v = log_bessel_i_scaled(1.0, 1e300)
    assert math.isfinite(v)
    assert v == pytest.approx(-0.5 * math.log(2 * math.pi * 1e300), abs=1e-12)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        log_bessel_i_scaled(0.0, -1.0)
    # orders below zero never arise from a Bessel process of dimension >= 2
    with pytest.raises(ValueError):
        log_bessel_i_scaled(-0.5, 1.0)


@settings(max_examples=150, deadline=None)
@given(nu=st.floats(0.0, 8.0), x=st.floats(1e-3, 500.0))
def test_recurrence(nu, x):
    # I_{ν-1} - I_{ν+1} = (2ν/x) I_ν, checked in the scaled log form
    lm = log_bessel_i_scaled(nu - 1, x) if nu >= 1 else None
    if lm is None:
        return
    lp = log_bessel_i_scaled(nu + 1, x)
    l0 = log_bessel_i_scaled(nu, x)
    lhs = math.exp(lm - l0) - math.exp(lp - l0)
    assert lhs == pytest.approx(2 * nu / x, rel=1e-10, abs=1e-12)
