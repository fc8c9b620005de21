"""Principal Dirichlet eigenpair of -r^{1-N}(r^{N-1} φ')' + V φ on (a, b).

The operator is discretized by symmetric finite differences with the weight
r^{N-1} sampled at cell faces, giving a generalized problem A φ = λ W φ
with A tridiagonal and W diagonal.  After symmetrizing with W^{-1/2} the
lowest eigenvalue is found by Sturm-sequence bisection and the vector by
inverse iteration.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._jit import njit

NEGATIVE_TOL = 1e-8


class ConvergenceError(RuntimeError):
    pass


class SpectralVerdict(str, enum.Enum):
    BLOWUP_FOR_ALL_P = "BlowUpForAllP"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self) -> str:
        return self.value


def _zero(r):
    return np.zeros_like(r)


@dataclass(frozen=True)
class EigenProblem:
    N: float
    interval: tuple[float, float]
    potential: Callable[[np.ndarray], np.ndarray] = _zero
    grid_points: int = 2001

    def __post_init__(self):
        a, b = self.interval
        if not a > 0:
            raise ValueError(f"left endpoint must be positive, got {a}")
        if not b > a:
            raise ValueError("need a < b")
        if self.grid_points < 3:
            raise ValueError("grid_points must be >= 3")
        if not self.N >= 1:
            raise ValueError("N must be >= 1")

    def grid(self) -> np.ndarray:
        a, b = self.interval
        return np.linspace(a, b, self.grid_points)


@dataclass(frozen=True)
class EigenPair:
    lambda0: float
    r: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    rayleigh: float = math.nan
    iterations: int = 0


@njit
def _sturm_count(d, e, x):
    """Number of eigenvalues of the symmetric tridiagonal (d, e) below x."""
    count = 0
    q = d[0] - x
    if q < 0.0:
        count += 1
    for i in range(1, d.size):
        if q == 0.0:
            q = 1e-300
        q = d[i] - x - e[i - 1] * e[i - 1] / q
        if q < 0.0:
            count += 1
    return count


@njit
def _bisect_lowest(d, e, lo, hi, max_iter):
    it = 0
    while it < max_iter:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _sturm_count(d, e, mid) >= 1:
            hi = mid
        else:
            lo = mid
        it += 1
        if hi - lo <= 4e-16 * max(abs(lo), abs(hi)):
            break
    return 0.5 * (lo + hi), it


@njit
def _shifted_solve(d, e, sigma, rhs):
    """Solve (T - sigma I) y = rhs by the Thomas algorithm."""
    n = d.size
    c = np.empty(n)
    y = np.empty(n)
    piv = d[0] - sigma
    c[0] = e[0] / piv if n > 1 else 0.0
    y[0] = rhs[0] / piv
    for i in range(1, n):
        piv = d[i] - sigma - e[i - 1] * c[i - 1]
        if i < n - 1:
            c[i] = e[i] / piv
        y[i] = (rhs[i] - e[i - 1] * y[i - 1]) / piv
    for i in range(n - 2, -1, -1):
        y[i] -= c[i] * y[i + 1]
    return y


@njit
def _rayleigh(d, e, y):
    num = 0.0
    den = 0.0
    n = d.size
    for i in range(n):
        num += d[i] * y[i] * y[i]
        den += y[i] * y[i]
        if i < n - 1:
            num += 2.0 * e[i] * y[i] * y[i + 1]
    return num / den


def assemble(prob: EigenProblem):
    """Symmetrized tridiagonal (diag, offdiag), interior grid and weights."""
    r = prob.grid()
    h = r[1] - r[0]
    faces = 0.5 * (r[:-1] + r[1:])
    f = faces ** (prob.N - 1.0)
    ri = r[1:-1]
    w = ri ** (prob.N - 1.0)
    V = np.asarray(prob.potential(ri), dtype=float) * np.ones_like(ri)
    if not np.all(np.isfinite(V)):
        raise ValueError("potential must be finite on the grid")
    diag = (f[:-1] + f[1:]) / (h * h * w) + V
    off = -f[1:-1] / (h * h * np.sqrt(w[:-1] * w[1:]))
    return diag, off, r, w


def principal_eigenpair(prob: EigenProblem, max_iter: int = 200) -> EigenPair:
    """Smallest eigenvalue and the positive eigenfunction, ∫ φ r^{N-1} dr = 1."""
    d, e, r, w = assemble(prob)
    # Gershgorin interval
    rad = np.zeros_like(d)
    rad[:-1] += np.abs(e)
    rad[1:] += np.abs(e)
    lo = float(np.min(d - rad)) - 1.0
    hi = float(np.max(d + rad)) + 1.0
    lam, iters = _bisect_lowest(d, e, lo, hi, max_iter)
    if iters >= max_iter:
        raise ConvergenceError(f"bisection did not converge in {max_iter} iterations")
    # shift just below λ0 so the factorization stays positive definite
    scale = max(abs(lam), 1.0)
    sigma = lam - 1e-9 * scale
    y = np.ones_like(d)
    for _ in range(3):
        y = _shifted_solve(d, e, sigma, y)
        y /= np.linalg.norm(y)
    if y[np.argmax(np.abs(y))] < 0:
        y = -y
    phi = np.zeros_like(r)
    phi[1:-1] = y / np.sqrt(w)
    # inverse iteration on the exact λ0 cannot produce sign changes unless the
    # discretization is broken
    if np.any(phi[1:-1] <= 0):
        raise AssertionError("principal eigenfunction is not positive in the interior")
    mass = np.trapezoid(phi * r ** (prob.N - 1.0), r)
    phi /= mass
    return EigenPair(
        lambda0=float(lam), r=r, phi=phi, rayleigh=float(_rayleigh(d, e, y)), iterations=int(iters)
    )


def annulus_scaling(N: float, sizes: Sequence[float], grid_points: int = 2001) -> list[tuple[float, float]]:
    """λ_n n² for the free operator on (n, 2n)."""
    if len(sizes) < 2:
        raise ValueError("need at least two annulus sizes")
    out = []
    for n in sizes:
        pair = principal_eigenpair(EigenProblem(N=N, interval=(n, 2.0 * n), grid_points=grid_points))
        out.append((float(n), pair.lambda0 * n * n))
    return out


@dataclass(frozen=True)
class SpectralReport:
    verdict: SpectralVerdict
    lambda0: float
    a_inf: float


def spectral_blowup_criterion(
    n: float,
    V: Callable[[np.ndarray], np.ndarray],
    domain: tuple[float, float],
    a_inf: float,
    grid_points: int = 200001,
    tol: float = NEGATIVE_TOL,
) -> SpectralReport:
    """Blow-up for every p > 1 whenever λ0(-Δ + V) < 0 on the radial shell.

    Sufficient only: a nonnegative eigenvalue proves nothing.
    """
    if not a_inf > 0:
        raise ValueError("a_inf must be positive")
    pair = principal_eigenpair(EigenProblem(N=n, interval=domain, potential=V, grid_points=grid_points))
    verdict = SpectralVerdict.BLOWUP_FOR_ALL_P if pair.lambda0 < -tol else SpectralVerdict.INCONCLUSIVE
    return SpectralReport(verdict=verdict, lambda0=pair.lambda0, a_inf=a_inf)


def inverse_square(coefficient: float) -> Callable[[np.ndarray], np.ndarray]:
    """V(r) = coefficient / r², unregularized."""

    def V(r):
        r = np.asarray(r, dtype=float)
        return coefficient / (r * r)

    return V
