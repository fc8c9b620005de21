"""Radial semilinear heat solver with blow-up / global classification."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from ..exponents import BORDERLINE_MARGIN, PotentialSpec, fujita_exponent
from . import _core
from .model import (
    InitialData,
    ProblemSpec,
    Snapshot,
    SolveOutcome,
    SolverConfig,
    SolverError,
    Verdict,
)

_GLX, _GLW = np.polynomial.legendre.leggauss(8)
CHUNK_STEPS = 200_000
BOUNDARY_RATIO = 1e-10


class BoundaryWarning(UserWarning):
    """Solution mass is reaching the truncated outer boundary."""


@dataclass(frozen=True)
class Grid:
    x: np.ndarray  # all nodes including Dirichlet ones
    free: slice  # unknowns
    lo: np.ndarray
    di: np.ndarray
    up: np.ndarray
    vol: np.ndarray  # weighted cell volumes of the unknowns
    origin_R: float  # half-width of the origin cell, 0 when there is none
    h: float
    sim: bool

    @property
    def x_free(self) -> np.ndarray:
        return self.x[self.free]


def _weight(x, d, sim):
    w = x ** (d - 1.0)
    if sim:
        w = w * np.exp(0.25 * x * x)
    return w


def _cell_volumes(a, b, d, sim):
    """∫_a^b weight, 8-point Gauss-Legendre per cell."""
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    pts = mid[:, None] + half[:, None] * _GLX[None, :]
    return half * (_weight(pts, d, sim) @ _GLW)


def build_grid(d: float, r_lo: float, r_hi: float, points: int, origin: bool, sim: bool) -> Grid:
    x = np.linspace(r_lo, r_hi, points)
    h = x[1] - x[0]
    if origin:
        free = slice(0, points - 1)
    else:
        free = slice(1, points - 1)
    xf = x[free]
    left = np.maximum(xf - 0.5 * h, r_lo)
    right = xf + 0.5 * h
    vol = _cell_volumes(left, right, d, sim)
    if origin:
        # exact for the pure power weight; the e^{x²/4} factor is 1 to O(h²)
        vol[0] = (0.5 * h) ** d / d if not sim else _cell_volumes(np.array([0.0]), np.array([0.5 * h]), d, sim)[0]
    f_right = _weight(right, d, sim)
    f_left = _weight(np.where(xf - 0.5 * h > r_lo, xf - 0.5 * h, 0.0), d, sim)
    up = f_right / (h * vol)
    lo = f_left / (h * vol)
    if origin:
        lo[0] = 0.0
    di = -(lo + up)
    return Grid(x=x, free=free, lo=lo, di=di, up=up, vol=vol,
                origin_R=0.5 * h if origin else 0.0, h=h, sim=sim)


def _pack(spec: ProblemSpec) -> np.ndarray:
    prm = np.zeros(_core.N_PARAMS)
    prm[_core.P_P] = spec.p
    prm[_core.P_OMEGA] = spec.pot.omega
    prm[_core.P_EPS] = spec.pot.regularization_eps
    prm[_core.P_C1] = spec.reac.c1
    prm[_core.P_M] = spec.reac.m
    prm[_core.P_KAPPA] = spec.kappa
    prm[_core.P_D] = spec.dimension
    prm[_core.P_LINEAR] = 1.0 if spec.linear else 0.0
    return prm


def choose_frame(spec: ProblemSpec, cfg: SolverConfig) -> str:
    if cfg.frame != "auto":
        if cfg.frame == "similarity" and spec.exterior:
            raise ValueError("the similarity frame needs the whole space")
        return cfg.frame
    if not spec.exterior and cfg.t_max > cfg.similarity_after:
        return "similarity"
    return "physical"


def _classify(t, sup, t_max, window, max_sup):
    """Global iff the trailing window decays monotonically and ends below half the max."""
    start = (1.0 - window) * t_max
    sel = t >= start
    ts, ss = t[sel], sup[sel]
    evidence = {"final_sup": float(sup[-1]), "max_sup": float(max_sup)}
    if ss.size < 2:
        evidence["reason"] = "too few samples in the decay window"
        return Verdict.UNDETERMINED, evidence
    # allow roundoff-level wiggle
    incr = np.diff(ss) > 1e-12 * ss[:-1]
    decaying = not np.any(incr)
    below = sup[-1] < 0.5 * max_sup
    if ts[0] > 0 and ss[0] > 0 and ss[-1] > 0 and ts[-1] > ts[0]:
        evidence["decay_exponent"] = float(
            -(math.log(ss[-1]) - math.log(ss[0])) / (math.log(ts[-1]) - math.log(ts[0]))
        )
    evidence["monotone_window"] = bool(decaying)
    if decaying and below:
        return Verdict.GLOBAL, evidence
    evidence["reason"] = "no sustained decay" if not decaying else "not below half of running maximum"
    return Verdict.UNDETERMINED, evidence


def solve_radial(
    spec: ProblemSpec,
    cfg: SolverConfig | None = None,
    snapshot_times: Sequence[float] = (),
    margin: float = BORDERLINE_MARGIN,
    apply_policy: bool = True,
    initial_profile: Callable[[np.ndarray], np.ndarray] | None = None,
) -> SolveOutcome:
    """March the radial problem to blow-up or ``cfg.t_max``.

    Strang splitting: a half step of the exact flow of u' = -V u + a u^p,
    a Crank-Nicolson step of the radial Laplacian, another half reaction
    step.  Blow-up is declared once the sup norm exceeds
    ``cfg.blowup_threshold`` (or the reaction bracket closes below
    ``dt_min``); global behavior needs monotone decay over the trailing
    ``decay_window`` fraction and a final sup norm below half the maximum.
    With ``apply_policy`` runs within ``margin`` of p* are reported as
    Undetermined whatever the trajectory did.
    """
    cfg = cfg or SolverConfig()
    frame = choose_frame(spec, cfg)
    sim = frame == "similarity"
    d = spec.dimension
    notes: list[str] = []

    if sim:
        grid = build_grid(d, 0.0, cfg.xi_max, cfg.xi_points, origin=True, sim=True)
    else:
        if cfg.r_max <= spec.r_lo + 1:
            raise ValueError("r_max must exceed the inner radius by at least 1")
        if cfg.r_max < 5.0 * math.sqrt(cfg.t_max) + spec.r_lo:
            msg = f"r_max={cfg.r_max} is not large against the diffusion length sqrt(t_max)={math.sqrt(cfg.t_max):.3g}"
            warnings.warn(msg, BoundaryWarning, stacklevel=2)
            notes.append(msg)
        grid = build_grid(d, spec.r_lo, cfg.r_max, cfg.grid_points, origin=not spec.exterior, sim=False)

    profile = initial_profile if initial_profile is not None else spec.initial
    u = np.ascontiguousarray(np.asarray(profile(grid.x_free), dtype=float))
    if np.any(u < 0) or not np.all(np.isfinite(u)):
        raise ValueError("initial data must be finite and nonnegative")
    sup0 = float(u.max())
    if not cfg.blowup_threshold > sup0:
        raise ValueError("blowup_threshold must exceed the initial sup norm")

    prm = _pack(spec)
    cap = 2.0 / float(np.max(-grid.di)) if cfg.positivity_cap else math.inf

    # time variable of the march: t, or τ = log(1+t)
    to_s = (lambda t: math.log1p(t)) if sim else (lambda t: t)
    stops = sorted({float(t) for t in snapshot_times if 0 < t < cfg.t_max} | {cfg.t_max})
    snaps: list[Snapshot] = []
    if any(t == 0 for t in snapshot_times):
        snaps.append(_snapshot(grid, u, 0.0, sim))

    ts_parts, sup_parts, dt_parts = [np.array([0.0])], [np.array([sup0])], [np.array([0.0])]
    s = 0.0
    dt = cfg.dt_init
    status = _core.ST_DONE
    steps = 0
    boundary_flagged = False
    buf_s = np.empty(CHUNK_STEPS)
    buf_u = np.empty(CHUNK_STEPS)
    buf_dt = np.empty(CHUNK_STEPS)
    dt_max = to_s(cfg.dt_max) if math.isfinite(cfg.dt_max) else math.inf
    for t_stop in stops:
        s_stop = to_s(t_stop)
        while True:
            status, s, dt, nrec = _core.march(
                u, grid.x_free, grid.lo, grid.di, grid.up, prm, grid.origin_R, sim, s, s_stop,
                dt, dt_max, cfg.dt_min, cap, cfg.blowup_threshold, cfg.reaction_tol,
                min(CHUNK_STEPS, cfg.max_steps - steps), buf_s, buf_u, buf_dt, _GLX, _GLW,
            )
            steps += nrec
            ts_parts.append(buf_s[:nrec].copy())
            sup_parts.append(buf_u[:nrec].copy())
            dt_parts.append(buf_dt[:nrec].copy())
            if not boundary_flagged and u[-1] > BOUNDARY_RATIO * max(u.max(), 1e-300):
                boundary_flagged = True
                msg = f"boundary value {u[-1]:.3g} exceeds {BOUNDARY_RATIO:g} of the sup norm at t={_to_t(s, sim):.6g}"
                warnings.warn(msg, BoundaryWarning, stacklevel=2)
                notes.append(msg)
            if status == _core.ST_FULL and steps < cfg.max_steps:
                continue
            break
        if status != _core.ST_DONE:
            break
        if t_stop != cfg.t_max or t_stop in snapshot_times:
            snaps.append(_snapshot(grid, u, t_stop, sim))

    s_tr = np.concatenate(ts_parts)
    t_tr = np.expm1(s_tr) if sim else s_tr
    sup_tr = np.concatenate(sup_parts)
    dt_tr = np.concatenate(dt_parts)
    if sim:
        # report physical step sizes
        dt_tr = np.concatenate([[0.0], np.diff(t_tr)])

    blowup_time = None
    evidence: dict = {"steps": steps, "frame": frame}
    if status == _core.ST_UNDERFLOW:
        raise SolverError(
            f"time step fell below dt_min={cfg.dt_min} at t={_to_t(s, sim):.6g} with sup norm {u.max():.3g}"
        )
    if status in (_core.ST_THRESHOLD, _core.ST_ODE_BLOWUP):
        verdict = Verdict.BLOWUP
        blowup_time = float(t_tr[-1])
        growth = sup_tr[-1] - sup_tr[-2] if sup_tr.size > 1 else 0.0
        evidence.update({"final_sup": float(sup_tr[-1]), "growth": float(growth),
                         "trigger": "threshold" if status == _core.ST_THRESHOLD else "reaction bracket"})
        if status == _core.ST_THRESHOLD and growth <= 0:
            verdict = Verdict.UNDETERMINED
    elif status == _core.ST_FULL:
        verdict = Verdict.UNDETERMINED
        evidence["reason"] = f"step budget of {cfg.max_steps} exhausted at t={float(t_tr[-1]):.6g}"
    else:
        verdict, ev = _classify(t_tr, sup_tr, cfg.t_max, cfg.decay_window, float(sup_tr.max()))
        evidence.update(ev)

    raw = verdict
    policy = False
    if apply_policy and not spec.linear and spec.kappa == 0.0:
        rep = fujita_exponent(spec.pot, spec.reac)
        if math.isfinite(rep.p_star) and abs(spec.p - rep.p_star) < margin:
            policy = True
            verdict = Verdict.UNDETERMINED
            evidence["policy"] = f"|p - p*| = {abs(spec.p - rep.p_star):.3g} < {margin}"

    return SolveOutcome(
        verdict=verdict,
        blowup_time=blowup_time,
        t=t_tr,
        sup_norm=sup_tr,
        dt=dt_tr,
        snapshots=tuple(snaps),
        evidence=evidence,
        frame=frame,
        policy_undetermined=policy,
        raw_verdict=raw,
        warnings=tuple(notes),
    )


def _to_t(s, sim):
    return math.expm1(s) if sim else s


def _snapshot(grid: Grid, u_free: np.ndarray, t: float, sim: bool) -> Snapshot:
    u = np.zeros_like(grid.x)
    u[grid.free] = u_free
    r = grid.x * math.sqrt(1.0 + t) if sim else grid.x.copy()
    return Snapshot(t=float(t), r=r, u=u)


def weighted_mass(grid: Grid, u_free: np.ndarray) -> float:
    return float(np.dot(grid.vol, u_free))


# ---------------------------------------------------------------------------
# v = r^{-α} u


def transform_to_v(snapshot: Snapshot, alpha: float) -> Snapshot:
    """v(r) = r^{-α} u(r)."""
    if alpha == 0.0:
        return Snapshot(t=snapshot.t, r=snapshot.r.copy(), u=snapshot.u.copy())
    if np.any(snapshot.r <= 0):
        raise ValueError("r^{-alpha} is undefined at r = 0 for alpha != 0")
    return Snapshot(t=snapshot.t, r=snapshot.r.copy(), u=snapshot.r ** (-alpha) * snapshot.u)


def v_problem(spec: ProblemSpec) -> tuple[ProblemSpec, float]:
    """Equation for v = r^{-α} u: dimension N = n + 2α, no potential,
    reaction coefficient a(r) r^{α(p-1)}.  Returns (spec, α)."""
    rep = fujita_exponent(spec.pot, spec.reac)
    if not math.isfinite(rep.p_star):
        raise ValueError("the change of variables needs omega above the Hardy threshold")
    alpha = rep.alpha
    pot = PotentialSpec(omega=0.0, n=rep.N, regularization_eps=spec.pot.regularization_eps)
    return replace(spec, pot=pot, kappa=alpha * (spec.p - 1.0)), alpha


def solve_v_equation(spec: ProblemSpec, cfg: SolverConfig | None = None, snapshot_times=(), **kw) -> SolveOutcome:
    """Solve for v directly, starting from ψ = r^{-α} φ."""
    vspec, alpha = v_problem(spec)
    if alpha != 0.0 and not spec.exterior:
        raise ValueError("v = r^{-alpha} u is singular at the origin; use an exterior domain")
    phi = spec.initial

    def psi(r):
        return np.asarray(r, dtype=float) ** (-alpha) * phi(r)

    kw.setdefault("apply_policy", False)
    return solve_radial(vspec, cfg, snapshot_times=snapshot_times, initial_profile=psi, **kw)


def coefficient_residual(omega: float, n: float, r) -> np.ndarray:
    """α(α+n-2)/r² - ω/r², which must vanish for α = α(ω, n)."""
    from ..exponents import alpha_root

    a = alpha_root(omega, n)
    r = np.asarray(r, dtype=float)
    return (a * (a + n - 2.0) - omega) / (r * r)


def default_initial(amplitude: float = 1.0, width: float = 1.0, center: float = 0.0) -> InitialData:
    return InitialData(amplitude=amplitude, center=center, width=width)
