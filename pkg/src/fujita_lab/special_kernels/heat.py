"""Heat kernels of d²/dr² + (N-1)/r d/dr on (0, ∞) and their exterior bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .._jit import njit
from .bessel import log_ive


@dataclass(frozen=True)
class KernelParams:
    """Bessel-process kernel configuration.

    ``comparison_c`` and ``comparison_K0`` are the constants in
    q̄(t, r, ρ) >= c q_N(K0 t, r, ρ); (1, 1) turns the bound into q_N itself.
    """

    N: float
    r0: float = 0.0
    comparison_c: float = 1.0
    comparison_K0: float = 1.0
    quad_tol: float = 1e-6
    tail_cutoff: float = 700.0

    def __post_init__(self):
        if not self.N >= 2:
            raise ValueError(f"effective dimension N must be >= 2, got {self.N}")
        if self.r0 < 0:
            raise ValueError("r0 must be >= 0")
        if not 0 < self.comparison_c <= 1:
            raise ValueError("comparison_c must lie in (0, 1]")
        if not self.comparison_K0 >= 1:
            raise ValueError("comparison_K0 must be >= 1")


@njit
def log_qn(N, t, r, rho):
    """log q_N(t, r, ρ), the Bessel-process transition density in ρ."""
    nu = 0.5 * N - 1.0
    z = r * rho / (2.0 * t)
    d = r - rho
    # exp(-(r²+ρ²)/4t) I_nu(z) = exp(-(r-ρ)²/4t) * [e^{-z} I_nu(z)]
    return (
        -d * d / (4.0 * t)
        + (N - 1.0) * math.log(rho)
        - math.log(2.0 * t)
        - nu * math.log(r * rho)
        + log_ive(nu, z)
    )


@njit
def _log_qn_array(N, t, r, rho, out):
    for i in range(out.size):
        out[i] = log_qn(N, t[i], r[i], rho[i])


def _bcast(*args):
    arrs = np.broadcast_arrays(*[np.asarray(a, dtype=float) for a in args])
    shape = arrs[0].shape
    return shape, [np.ascontiguousarray(a).ravel() for a in arrs]


def log_kernel_qn(N: float, t, r, rho):
    """Vectorized log q_N(t, r, ρ) for t, r, ρ > 0."""
    shape, (tt, rr, pp) = _bcast(t, r, rho)
    if np.any(tt <= 0) or np.any(rr <= 0) or np.any(pp <= 0):
        raise ValueError("kernel_qn needs t, r, rho > 0")
    out = np.empty(tt.size)
    _log_qn_array(float(N), tt, rr, pp, out)
    return float(out[0]) if shape == () else out.reshape(shape)


def kernel_qn(params: KernelParams | float, t, r, rho):
    """q_N(t, r, ρ) = exp(-(r²+ρ²)/4t) ρ^{N-1} / (2t (rρ)^{N/2-1}) I_{N/2-1}(rρ/2t)."""
    N = params.N if isinstance(params, KernelParams) else float(params)
    return np.exp(log_kernel_qn(N, t, r, rho))


def kernel_q3_closed_form(t, r, rho):
    """Three-dimensional radial Gaussian kernel, written with sinh removed."""
    t, r, rho = (np.asarray(a, dtype=float) for a in (t, r, rho))
    a = np.exp(-((rho - r) ** 2) / (4 * t))
    # e^{-(ρ-r)²/4t} - e^{-(ρ+r)²/4t} = e^{-(ρ-r)²/4t} (1 - e^{-rρ/t})
    return rho / (2 * r * np.sqrt(np.pi * t)) * a * (-np.expm1(-r * rho / t))


def gaussian_kernel(n: float, t, x_norm, y_norm, angle_cos):
    """(4πt)^{-n/2} exp(-|y-x|²/4t), with |y-x|² from the norms and the angle cosine."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    c = np.asarray(angle_cos, dtype=float)
    if np.any(np.abs(c) > 1):
        raise ValueError("|angle_cos| must be <= 1")
    x = np.asarray(x_norm, dtype=float)
    y = np.asarray(y_norm, dtype=float)
    d2 = np.maximum(x * x + y * y - 2.0 * x * y * c, 0.0)
    out = (4.0 * np.pi * t) ** (-0.5 * n) * np.exp(-d2 / (4.0 * t))
    return float(out) if out.ndim == 0 else out


def log_factor_2d(t, x_norm, y_norm):
    """The logarithmic correction of the planar exterior lower bound.

    log(1+|x|) log(1+|y|) / [(log(1+√t) + log(1+|x|)) (log(1+√t) + log(1+|y|))]
    """
    t, x, y = (np.asarray(a, dtype=float) for a in (t, x_norm, y_norm))
    lt = np.log1p(np.sqrt(t))
    lx = np.log1p(x)
    ly = np.log1p(y)
    out = lx * ly / ((lt + lx) * (lt + ly))
    return float(out) if out.ndim == 0 else out


def dirichlet_lower_bound(params: KernelParams, t, r, rho):
    """Lower bound for the exterior Dirichlet kernel q̄_{(N, r0)}(t, r, ρ).

    N > 2: c q_N(K0 t, r, ρ).  N = 2: the planar bound with its log factor,
    c L(t, r, ρ) q_2(K0 t, r, ρ); q_2 is the radial form of the Gaussian
    kernel on R², and L depends on |x|, |y| only so angular integration
    commutes with it.
    """
    r_arr = np.asarray(r, dtype=float)
    rho_arr = np.asarray(rho, dtype=float)
    edge = params.r0 + 1.0
    if np.any(r_arr < edge) or np.any(rho_arr < edge):
        raise ValueError(f"lower bound only valid for r, rho >= r0 + 1 = {edge}")
    c, K0 = params.comparison_c, params.comparison_K0
    base = kernel_qn(params.N, K0 * np.asarray(t, dtype=float), r_arr, rho_arr)
    if params.N > 2:
        return c * base
    return c * log_factor_2d(t, r_arr, rho_arr) * base
