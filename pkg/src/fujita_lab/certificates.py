"""Global-existence and blow-up certificates.

* Self-similar supersolution  v = δ r^α (t+1)^{-γ} exp(-r²/4(t+1)):
  parameter selection and a pointwise residual check.
* Moment functional on annuli and its Bernoulli-type differential
  inequality  F' >= -a F + b F^p.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable

import numpy as np
from scipy import optimize

from .exponents import (
    PotentialSpec,
    ReactionSpec,
    alpha_root,
    fujita_exponent,
    hardy_threshold,
)

RESIDUAL_TOL = 1e-12
DELTA_SAFETY = 0.5
# Standard (r, t) sample grid of the residual check.
R_GRID = (1e-3, 100.0, 241)
T_GRID = (1e-3, 1e4, 241)


class InfeasibleError(ValueError):
    """The γ interval is empty: p <= p*(ω, m)."""


@dataclass(frozen=True)
class SupersolutionParams:
    alpha: float
    gamma: float
    delta: float
    c: float = 0.25
    # bookkeeping
    gamma_interval: tuple[float, float] = (math.nan, math.nan)
    C: float = math.nan  # a(r) <= C r^m (m <= 0) or C (r ∨ 1)^m (m > 0)
    C1: float = math.nan
    C1_domain_limited: bool = False
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if self.c != 0.25:
            raise ValueError("the Gaussian rate is fixed at 1/4")
        lo, hi = self.gamma_interval
        if math.isfinite(lo) and not lo <= self.gamma < hi:
            raise ValueError("gamma outside its feasible interval")

    def log_v(self, r, t):
        r = np.asarray(r, dtype=float)
        t = np.asarray(t, dtype=float)
        return (
            math.log(self.delta)
            + self.alpha * np.log(r)
            - self.gamma * np.log1p(t)
            - self.c * r * r / (1.0 + t)
        )

    def __call__(self, r, t):
        return np.exp(self.log_v(r, t))


def gamma_interval(alpha: float, n: float, m: float, p: float) -> tuple[float, float]:
    """[α/2 + (1 + m/2)/(p-1), α + n/2); for m > 0 also the m = 0 bound."""
    lo = 0.5 * alpha + (1.0 + 0.5 * m) / (p - 1.0)
    if m > 0:
        lo = max(lo, 0.5 * alpha + 1.0 / (p - 1.0))
    return lo, alpha + 0.5 * n


def sup_power_gaussian(k: float, rate: float, z_min: float = 0.0) -> float:
    """sup_{z > z_min} z^k exp(-rate z) by golden-section search on log z.

    Infinite when k < 0 and z_min = 0.
    """
    if k == 0.0:
        return math.exp(-rate * z_min)
    if k < 0.0:
        if z_min <= 0.0:
            return math.inf
        return math.exp(k * math.log(z_min) - rate * z_min)

    def neg_log(y):
        return -(k * y - rate * math.exp(y))

    # the maximizer log(k/rate) is bracketed generously
    y0 = math.log(k / rate)
    res = optimize.minimize_scalar(neg_log, bracket=(y0 - 5.0, y0, y0 + 5.0), method="golden",
                                   options={"xtol": 1e-12})
    y = max(res.x, math.log(z_min)) if z_min > 0 else res.x
    return math.exp(-neg_log(y))


def reaction_bound_constant(reac: ReactionSpec, a: Callable | None = None) -> float:
    """Smallest C with a(r) <= C r^m (m <= 0) or C (r ∨ 1)^m (m > 0), by grid maximization."""
    a = a or reac
    r = np.geomspace(1e-6, 1e6, 20001)
    m = reac.m
    base = r**m if m <= 0 else np.maximum(r, 1.0) ** m
    return float(np.max(a(r) / base))


def supersolution_params(
    omega: float,
    n: float,
    m: float,
    p: float,
    reac: ReactionSpec | None = None,
    domain: tuple[float, float] | None = None,
) -> SupersolutionParams:
    """Pick γ at the midpoint of its interval and δ small enough.

    δ^{p-1} = 1/2 (α + n/2 - γ) / (C1 C) makes the residual bound
    negative.  When α(p-1) + m < 0 the supremum defining C1 is infinite; with
    ``domain = (r_min, t_max)`` it is then taken over z >= r_min²/(t_max+1),
    so the certificate covers r >= r_min, t <= t_max only.
    """
    if omega < hardy_threshold(n):
        raise InfeasibleError(f"omega={omega} is below the Hardy threshold: no supersolution of this form")
    reac = reac or ReactionSpec(m=m)
    if reac.m != m:
        raise ValueError("reaction spec and m disagree")
    rep = fujita_exponent(PotentialSpec(omega=omega, n=n), reac)
    lo, hi = gamma_interval(rep.alpha, n, m, p)
    if not p > rep.p_star or not lo < hi:
        raise InfeasibleError(
            f"p={p} <= p*={rep.p_star:.12g}: the gamma interval [{lo:.6g}, {hi:.6g}) is empty"
        )
    alpha = alpha_root(omega, n)
    gamma = 0.5 * (lo + hi)
    C = reaction_bound_constant(reac)
    rate = 0.25 * (p - 1.0)
    notes = []
    z_min = 0.0
    limited = False
    ks = [0.5 * (alpha * (p - 1.0) + m)]
    if m > 0:
        ks.append(0.5 * alpha * (p - 1.0))
    if min(ks) < 0:
        if domain is None:
            domain = (R_GRID[0], T_GRID[1])
        r_min, t_max = domain
        z_min = r_min * r_min / (t_max + 1.0)
        limited = True
        notes.append(f"C1 taken over z >= {z_min:.3g} (r >= {r_min}, t <= {t_max})")
    C1 = max(sup_power_gaussian(k, rate, z_min) for k in ks)
    delta = (DELTA_SAFETY * (hi - gamma) / (C1 * C)) ** (1.0 / (p - 1.0))
    return SupersolutionParams(
        alpha=alpha,
        gamma=gamma,
        delta=delta,
        gamma_interval=(lo, hi),
        C=C,
        C1=C1,
        C1_domain_limited=limited,
        notes=tuple(notes),
    )


def residual_terms(params: SupersolutionParams, omega: float, n: float, m: float, p: float, r, t):
    """The operator applied to v, divided by v, from the analytic derivatives.

    Returns the pieces (curvature, inverse-square, time, reaction); their sum
    is the full left-hand side.  Nothing is simplified in advance, so the
    cancellations are numerical.
    """
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(r <= 0):
        raise ValueError("the supersolution is singular at r = 0; use r > 0")
    a, c, g = params.alpha, params.c, params.gamma
    T = t + 1.0
    vr = a / r - 2.0 * c * r / T
    vrr = a * a / (r * r) + 4.0 * c * c * r * r / (T * T) - 4.0 * c * a / T - a / (r * r) - 2.0 * c / T
    vt = -g / T + c * r * r / (T * T)
    V = omega / (r * r)
    C = params.C
    a_r = C * (r**m if m <= 0 else np.maximum(r, 1.0) ** m)
    react = a_r * np.exp((p - 1.0) * params.log_v(r, t))
    return vrr + (n - 1.0) / r * vr - V - vt, react


def supersolution_residual(
    params: SupersolutionParams, omega: float, n: float, m: float, p: float, r=None, t=None
) -> float:
    """max over the grid of v^{-1}(v_rr + (n-1)/r v_r - V v - v_t + a v^p)."""
    if r is None:
        r = np.geomspace(*R_GRID)
    if t is None:
        t = np.concatenate([[0.0], np.geomspace(*T_GRID)])
    R, Tm = np.meshgrid(np.asarray(r, dtype=float), np.asarray(t, dtype=float), indexing="ij")
    lin, react = residual_terms(params, omega, n, m, p, R, Tm)
    return float(np.max(lin + react))


def cancellation_terms(params: SupersolutionParams, omega: float, n: float, r, t):
    """(4c² - c) r²/(t+1)² and (α² + (n-2)α - ω)/r², both identically zero."""
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    c, a = params.c, params.alpha
    first = (4.0 * c * c - c) * r * r / (t + 1.0) ** 2
    second = (a * a + (n - 2.0) * a - omega) / (r * r)
    return first, second


def shifted_min_finite(params: SupersolutionParams, x0: float, n: int = 2, half_width: float = 5.0,
                       points: int = 101, t: float = 0.0) -> bool:
    """min(v(|x - x0 e1|), v(|x|)) is finite on a planar sample grid containing 0 and x0 e1.

    Only meaningful for α < 0, where v alone is infinite at the origin.
    """
    if x0 == 0:
        raise ValueError("x0 must be nonzero")
    xs = np.unique(np.concatenate([np.linspace(-half_width, half_width, points), [0.0, x0]]))
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    d0 = np.hypot(X, Y)
    d1 = np.hypot(X - x0, Y)
    with np.errstate(divide="ignore", over="ignore"):
        v0 = np.where(d0 > 0, params(np.where(d0 > 0, d0, 1.0), t), np.inf if params.alpha < 0 else 0.0)
        v1 = np.where(d1 > 0, params(np.where(d1 > 0, d1, 1.0), t), np.inf if params.alpha < 0 else 0.0)
    return bool(np.all(np.isfinite(np.minimum(v0, v1))))


def certificate_record(omega: float, n: float, m: float, p: float, r=None, t=None) -> dict:
    """JSON-ready record: inputs, parameters, max residual, pass/fail."""
    rec = {"omega": omega, "n": n, "m": m, "p": p}
    try:
        params = supersolution_params(omega, n, m, p)
    except InfeasibleError as exc:
        rec.update({"feasible": False, "reason": str(exc), "passed": False})
        return rec
    res = supersolution_residual(params, omega, n, m, p, r, t)
    d = asdict(params)
    d["gamma_interval"] = list(params.gamma_interval)
    d["notes"] = list(params.notes)
    rec.update({"feasible": True, "params": d, "max_residual": res, "passed": res <= RESIDUAL_TOL})
    return rec


def write_certificates(records: Iterable[dict], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(list(records), fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Moment functional


def bernoulli_blowup_time(a_lin: float, b: float, p: float, F0: float) -> float | None:
    """Blow-up time of F' = -a_lin F + b F^p, F(0) = F0, or None if F stays bounded.

    With G = F^{1-p},  G' = (p-1)(a_lin G - b), so
    G(t) = b/a_lin + (G0 - b/a_lin) e^{(p-1) a_lin t}, which reaches 0 at
    T* = ln[(b/a_lin) / (b/a_lin - G0)] / ((p-1) a_lin)  when G0 < b/a_lin.
    """
    if a_lin < 0 or not b > 0 or not p > 1 or not F0 > 0:
        raise ValueError("need a_lin >= 0, b > 0, p > 1, F0 > 0")
    q = p - 1.0
    G0 = F0 ** (-q)
    if a_lin == 0.0:
        return G0 / (q * b)
    ratio = G0 * a_lin / b
    if ratio >= 1.0:
        return None
    return -math.log1p(-ratio) / (q * a_lin)


@dataclass(frozen=True)
class MomentModel:
    """F' >= -(c_eig/n²) F + c1 n^M F^p on the annulus (n, 2n)."""

    n_ann: float
    M: float
    p: float
    c_eig: float
    c1: float
    F0: float = 0.0

    def __post_init__(self):
        if not (self.n_ann > 0 and self.c_eig > 0 and self.c1 > 0):
            raise ValueError("n_ann, c_eig, c1 must be positive")
        if not self.p > 1:
            raise ValueError("p must exceed 1")
        if self.F0 < 0:
            raise ValueError("F0 must be >= 0")

    @property
    def a_lin(self) -> float:
        return self.c_eig / self.n_ann**2

    @property
    def b(self) -> float:
        return self.c1 * self.n_ann**self.M


def moment_threshold(model: MomentModel) -> float:
    """(c_eig/c1)^{1/(p-1)} n^{-(M+2)/(p-1)}, the level above which F blows up."""
    q = model.p - 1.0
    thr = (model.c_eig / model.c1) ** (1.0 / q) * model.n_ann ** (-(model.M + 2.0) / q)
    alt = (model.a_lin / model.b) ** (1.0 / q)
    if not math.isclose(thr, alt, rel_tol=1e-10):
        raise AssertionError(f"threshold identity failed: {thr} vs {alt}")
    return thr


def moment_blowup_time(model: MomentModel) -> float | None:
    if model.F0 <= 0:
        return None
    return bernoulli_blowup_time(model.a_lin, model.b, model.p, model.F0)


def moment_crossover(C1: float, N: float, M: float, p: float, c_eig: float, c1: float,
                     n_lo: float = 2.0, log_n_max: float = 600.0) -> float | None:
    """Smallest annulus size n >= n_lo with C1 n^{-N} log n > threshold(n).

    Solved on log n.  At or below 1 + (2+M)/N the gap grows without bound, so a
    crossover exists; above it the gap eventually decreases and None may be
    returned.
    """
    q = p - 1.0

    def gap(y):
        return (math.log(C1) - N * y + math.log(y)) - (math.log(c_eig / c1) / q - (M + 2.0) / q * y)

    y0 = math.log(n_lo)
    if gap(y0) > 0:
        return n_lo
    ys = np.linspace(y0, log_n_max, 4001)
    vals = np.array([gap(y) for y in ys])
    idx = np.nonzero(vals > 0)[0]
    if idx.size == 0:
        return None
    j = idx[0]
    y = optimize.brentq(gap, ys[j - 1], ys[j], xtol=1e-14)
    return math.exp(y)


def moment_functional(r: np.ndarray, u: np.ndarray, N: float, n_ann: float, grid_points: int = 2001) -> float:
    """∫_n^{2n} u φ r^{N-1} dr with φ the normalized principal eigenfunction of the annulus."""
    from .spectral import EigenProblem, principal_eigenpair

    pair = principal_eigenpair(EigenProblem(N=N, interval=(n_ann, 2.0 * n_ann), grid_points=grid_points))
    if r[0] > n_ann or r[-1] < 2.0 * n_ann:
        raise ValueError("profile does not cover the annulus")
    uu = np.interp(pair.r, r, u)
    return float(np.trapezoid(uu * pair.phi * pair.r ** (N - 1.0), pair.r))
