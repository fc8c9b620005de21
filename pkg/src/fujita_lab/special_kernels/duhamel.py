"""Duhamel lower-bound integrals and the rescaled time integral at criticality."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .._jit import njit
from .heat import KernelParams, log_qn


class QuadratureError(RuntimeError):
    """Refinement did not reach the requested tolerance."""


@dataclass(frozen=True)
class DuhamelParams:
    K1: float = 1.0
    K2: float = 1.0
    beta: float = 0.0
    M: float = 0.0
    p: float = 2.0

    def __post_init__(self):
        if not (self.K1 > 0 and self.K2 > 0):
            raise ValueError("K1 and K2 must be positive")
        if not 0 <= self.beta < 1:
            raise ValueError("beta must lie in [0, 1)")
        if not self.p > 1:
            raise ValueError("p must exceed 1")


@dataclass(frozen=True)
class LowerBoundFit:
    """Constants of a bound  f(r, t) >= C t^a log(1+t)^b exp(-K r²/t)."""

    C: float
    K: float

    def __post_init__(self):
        if not (self.C > 0 and self.K > 0):
            raise ValueError(f"fitted constants must be positive, got C={self.C}, K={self.K}")

    def envelope(self, t, r, t_power, log_power=1.0):
        t = np.asarray(t, dtype=float)
        r = np.asarray(r, dtype=float)
        return self.C * t**t_power * np.log1p(t) ** log_power * np.exp(-self.K * r * r / t)


def fractional_split(N: float) -> tuple[int, float]:
    """Write N = N0 - beta with integer N0 and beta in [0, 1)."""
    N0 = math.ceil(N - 1e-12)
    beta = N0 - N
    if beta < 0:
        beta = 0.0
    return int(N0), float(beta)


def critical_exponent_reduced(N: float, M: float) -> float:
    return 1.0 + max(2.0 + M, 0.0) / N


def u_integrand_exponent(N: float, M: float, p: float) -> float:
    """Power of u near 0 in the rescaled integral; equals -1 exactly at criticality."""
    return 0.5 * N + 0.5 * M - 0.5 * N * p


def critical_u_integral(dp: DuhamelParams, N: float, t: float) -> float:
    """∫_{1/t}^{1/2} u^e (u + pK2(1-u))^{-(N+M)/2} (1-u)^{(M-β)/2} du, e = (N+M-Np)/2."""
    if not t > 2:
        raise ValueError("t must exceed 2")
    e = u_integrand_exponent(N, dp.M, dp.p)
    a = 0.5 * (N + dp.M)
    b = 0.5 * (dp.M - dp.beta)
    pk = dp.p * dp.K2

    # u = exp(y): the u^{-1} singularity at criticality becomes a constant integrand
    def f(y):
        u = math.exp(y)
        return math.exp((e + 1.0) * y) * (u + pk * (1.0 - u)) ** (-a) * (1.0 - u) ** b

    lo, hi = -math.log(t), -math.log(2.0)
    breaks = np.linspace(lo, hi, max(2, int(hi - lo) + 2))
    total = 0.0
    for y0, y1 in zip(breaks[:-1], breaks[1:]):
        val, err = integrate.quad(f, y0, y1, epsabs=0.0, epsrel=1e-12, limit=200)
        if not math.isfinite(val) or err > 1e-8 * max(abs(val), 1e-300):
            raise QuadratureError(f"u-integral failed to converge on [{y0}, {y1}]")
        total += val
    return total


# ---------------------------------------------------------------------------
# Tensor quadrature for the Duhamel double integral


@njit
def _log_kernel(N, two_d, t_eff, tau, a, b):
    """log of q_N(t_eff, a, b), times the planar log factor at time tau in 2-D mode."""
    val = log_qn(N, t_eff, a, b)
    if two_d:
        lt = math.log1p(math.sqrt(tau))
        la = math.log1p(a)
        lb = math.log1p(b)
        val += math.log(la * lb / ((lt + la) * (lt + lb)))
    return val


@njit
def _duhamel_log_terms(N, two_d, r0, K1, M, p, t, r, s_nodes, s_weights, gl_x, gl_w, cutoff, panel_scale):
    """Per-s log-integral over ρ; returns log of inner integrals (times ds weight)."""
    ns = s_nodes.size
    out = np.empty(ns)
    lo_edge = r0 + 1.0
    src = r0 + 2.0
    ng = gl_x.size
    for i in range(ns):
        s = s_nodes[i]
        v1 = 2.0 * K1 * (t - s)  # 2 * variance of the (t - s) factor
        v2 = 2.0 * K1 * s / p  # same for the p-th power factor
        # Gaussian envelope reach, padded for the polynomial prefactors
        w1 = math.sqrt(2.0 * v1 * (cutoff + 50.0))
        w2 = math.sqrt(2.0 * v2 * (cutoff + 50.0))
        lo = max(lo_edge, r - w1)
        hi = min(src + w2, r + w1)
        if hi <= lo:
            hi = lo + 1.0
        width = 1.0 / math.sqrt(1.0 / v1 + 1.0 / v2)
        npan = int(math.ceil((hi - lo) / (panel_scale * width)))
        if npan < 4:
            npan = 4
        if npan > 4000:
            npan = 4000
        h = (hi - lo) / npan
        m = npan * ng
        vals = np.empty(m)
        wts = np.empty(m)
        k = 0
        gmax = -np.inf
        for j in range(npan):
            a = lo + j * h
            for q in range(ng):
                rho = a + 0.5 * h * (gl_x[q] + 1.0)
                g = _log_kernel(N, two_d, K1 * (t - s), t - s, r, rho)
                g += M * math.log(rho)
                g += p * _log_kernel(N, two_d, K1 * s, s, rho, src)
                vals[k] = g
                wts[k] = 0.5 * h * gl_w[q]
                if g > gmax:
                    gmax = g
                k += 1
        acc = 0.0
        for k in range(m):
            if vals[k] > gmax - cutoff:
                acc += wts[k] * math.exp(vals[k] - gmax)
        # ds = s d(log s)
        out[i] = gmax + math.log(acc) + math.log(s * s_weights[i])
    return out


def _log_sum_exp(x: np.ndarray) -> float:
    m = np.max(x)
    return float(m + np.log(np.sum(np.exp(x - m))))


def _duhamel_level(kp: KernelParams, dp: DuhamelParams, t: float, r: float, ns: int, ng: int, panel_scale: float) -> float:
    x, w = np.polynomial.legendre.leggauss(ns)
    a, b = 0.0, math.log(t / 2.0)
    y = 0.5 * (b - a) * (x + 1.0) + a
    s_nodes = np.exp(y)
    s_weights = 0.5 * (b - a) * w
    gx, gw = np.polynomial.legendre.leggauss(ng)
    logs = _duhamel_log_terms(
        float(kp.N), kp.N == 2, float(kp.r0), float(dp.K1), float(dp.M), float(dp.p),
        float(t), float(r), s_nodes, s_weights, gx, gw, float(kp.tail_cutoff), panel_scale,
    )
    return _log_sum_exp(logs)


def log_duhamel_lower_integral(
    kp: KernelParams, dp: DuhamelParams, t: float, r: float, s_nodes: int = 128, max_levels: int = 4
) -> float:
    """log of ∫_1^{t/2} ds ∫_{r0+1}^∞ dρ k(K1(t-s), r, ρ) ρ^M k(K1 s, ρ, r0+2)^p.

    k is q_N, or the planar log-corrected kernel when N == 2.  Gauss-Legendre
    in log s, composite Gauss-Legendre in ρ clipped where the log integrand
    is ``tail_cutoff`` below its maximum; node counts double until two
    successive levels agree to ``quad_tol``.
    """
    if not t > 2:
        raise ValueError("t must exceed 2")
    if not r > kp.r0 + 1:
        raise ValueError(f"r must exceed r0 + 1 = {kp.r0 + 1}")
    prev = _duhamel_level(kp, dp, t, r, s_nodes, 8, 2.0)
    ns, scale = s_nodes, 2.0
    for _ in range(max_levels):
        ns *= 2
        scale /= 2.0
        cur = _duhamel_level(kp, dp, t, r, ns, 8, scale)
        if abs(math.expm1(cur - prev)) < kp.quad_tol:
            return cur
        prev = cur
    raise QuadratureError(
        f"Duhamel quadrature did not reach quad_tol={kp.quad_tol} at t={t}, r={r}"
    )


def duhamel_lower_integral(kp: KernelParams, dp: DuhamelParams, t: float, r: float, **kwargs) -> float:
    return math.exp(log_duhamel_lower_integral(kp, dp, t, r, **kwargs))


def fit_lower_bound(t, r, values, t_power: float, log_power: float = 1.0, K_floor: float = 1e-3) -> LowerBoundFit:
    """Fit f(r,t) >= C t^a log(1+t)^b exp(-K r²/t).

    K comes from a least-squares fit of log f against r²/t; C is then the
    largest constant that keeps the bound valid at every sample.
    """
    t = np.asarray(t, dtype=float).ravel()
    r = np.asarray(r, dtype=float).ravel()
    f = np.asarray(values, dtype=float).ravel()
    if np.any(f <= 0):
        raise ValueError("lower-bound fit needs strictly positive samples")
    y = np.log(f) - t_power * np.log(t) - log_power * np.log(np.log1p(t))
    x = r * r / t
    A = np.column_stack([np.ones_like(x), -x])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    K = max(float(coef[1]), K_floor)
    C = float(np.exp(np.min(y + K * x)))
    return LowerBoundFit(C=C, K=K)
