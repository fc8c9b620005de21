import math

import numpy as np
import pytest
from scipy import integrate

from fujita_lab.special_kernels import (
    DuhamelParams,
    KernelParams,
    LowerBoundFit,
    QuadratureError,
    critical_u_integral,
    duhamel_lower_integral,
    fit_lower_bound,
    fractional_split,
    kernel_qn,
    log_duhamel_lower_integral,
)
from fujita_lab.special_kernels.duhamel import critical_exponent_reduced, u_integrand_exponent


def test_fractional_split():
    assert fractional_split(3.0) == (3, 0.0)
    N0, beta = fractional_split(2.5)
    assert N0 == 3 and beta == pytest.approx(0.5)
    N0, beta = fractional_split(5.6)
    assert N0 == 6 and beta == pytest.approx(0.4)


def test_integrand_exponent_is_minus_one_at_criticality():
    for N, M in ((3.0, 0.0), (2.5, 1.0), (5.6, -0.7)):
        p = critical_exponent_reduced(N, M)
        assert u_integrand_exponent(N, M, p) == pytest.approx(-1.0, abs=1e-14)


def test_params_validation():
    with pytest.raises(ValueError):
        DuhamelParams(beta=1.0)
    with pytest.raises(ValueError):
        DuhamelParams(p=1.0)
    with pytest.raises(ValueError):
        DuhamelParams(K1=0.0)


def test_u_integral_against_direct_quadrature():
    dp = DuhamelParams(K2=1.3, beta=0.4, M=0.5, p=1.9)
    N, t = 2.6, 500.0
    e = u_integrand_exponent(N, dp.M, dp.p)
    f = lambda u: u**e * (u + dp.p * dp.K2 * (1 - u)) ** (-(N + dp.M) / 2) * (1 - u) ** ((dp.M - dp.beta) / 2)
    ref = integrate.quad(f, 1 / t, 0.5, epsrel=1e-12, limit=400, points=[1e-2, 1e-1])[0]
    assert critical_u_integral(dp, N, t) == pytest.approx(ref, rel=1e-10)


def test_u_integral_grows_like_log_at_criticality():
    N = 3.0
    dp = DuhamelParams(p=critical_exponent_reduced(N, 0.0))
    # the integrand in log u is (pK2)^{-3/2} near u = 0
    slope = (critical_u_integral(dp, N, 1e8) - critical_u_integral(dp, N, 1e6)) / math.log(100.0)
    assert slope == pytest.approx(dp.p ** (-1.5), rel=1e-3)


def test_duhamel_against_brute_force():
    kp = KernelParams(N=3.0, r0=0.5, quad_tol=1e-8)
    dp = DuhamelParams(p=2.0, M=0.3)
    t, r = 8.0, 2.0
    src = kp.r0 + 2.0

    def inner(s):
        f = lambda rho: (kernel_qn(3.0, t - s, r, rho) * rho**dp.M * kernel_qn(3.0, s, rho, src) ** dp.p)
        return integrate.quad(f, kp.r0 + 1, 60.0, epsrel=1e-11, limit=400, points=[r, src])[0]

    ref = integrate.quad(inner, 1.0, t / 2, epsrel=1e-10, limit=200)[0]
    assert duhamel_lower_integral(kp, dp, t, r) == pytest.approx(ref, rel=1e-6)


def test_planar_mode_is_smaller():
    kp = KernelParams(N=2.0, r0=1.0)
    dp = DuhamelParams(p=2.0)
    with_log = duhamel_lower_integral(kp, dp, 100.0, 3.0)
    # without the planar factor the same integral is the N slightly above 2 case
    without = duhamel_lower_integral(KernelParams(N=2.0 + 1e-9, r0=1.0), dp, 100.0, 3.0)
    assert 0 < with_log < without


def test_supercritical_decay_rate():
    kp = KernelParams(N=3.0, r0=1.5)
    dp = DuhamelParams(p=2.2)
    a, b = (duhamel_lower_integral(kp, dp, t, 3.0) * t**1.5 for t in (1e3, 1e5))
    assert b / a == pytest.approx(1.0, abs=0.01)


def test_critical_log_factor_emerges():
    # t^{N/2} I / log t approaches a constant from below, like A - B/log t
    kp = KernelParams(N=3.0, r0=1.5)
    dp = DuhamelParams(p=5.0 / 3.0)
    vals = [duhamel_lower_integral(kp, dp, t, 3.0) * t**1.5 / math.log(t) for t in (1e3, 1e4, 1e5, 1e6)]
    steps = np.diff(vals)
    assert np.all(steps > 0)
    assert np.all(np.diff(steps) < 0)
    # with the log removed the sequence still grows without bound
    raw = [v * math.log(t) for v, t in zip(vals, (1e3, 1e4, 1e5, 1e6))]
    assert raw[-1] / raw[0] > 1.5


def test_refinement_failure_is_reported():
    kp = KernelParams(N=3.0, r0=0.5, quad_tol=1e-15)
    with pytest.raises(QuadratureError):
        log_duhamel_lower_integral(kp, DuhamelParams(), 50.0, 2.0, s_nodes=4, max_levels=1)


def test_domain_checks():
    kp = KernelParams(N=3.0, r0=1.0)
    with pytest.raises(ValueError):
        duhamel_lower_integral(kp, DuhamelParams(), 1.5, 3.0)
    with pytest.raises(ValueError):
        duhamel_lower_integral(kp, DuhamelParams(), 10.0, 1.5)


def test_fit_lower_bound_recovers_envelope():
    rng = np.random.default_rng(3)
    t = rng.uniform(2, 100, 400)
    r = rng.uniform(0, 3, 400) * np.sqrt(t)
    true = LowerBoundFit(C=0.2, K=0.3)
    w = true.envelope(t, r, -1.5) * (1 + 0.05 * rng.uniform(size=400))
    fit = fit_lower_bound(t, r, w, t_power=-1.5)
    assert np.all(w >= fit.envelope(t, r, -1.5) * (1 - 1e-12))
    assert fit.K == pytest.approx(0.3, rel=0.05)
    assert fit.C == pytest.approx(0.2, rel=0.05)
