import math
import warnings

import numpy as np
import pytest
from scipy import integrate

from fujita_lab.exponents import PotentialSpec, ReactionSpec, alpha_root
from fujita_lab.pde_sim import (
    BoundaryWarning,
    Exterior,
    InitialData,
    ProblemSpec,
    SolverConfig,
    SolverError,
    Verdict,
    WholeSpace,
    build_grid,
    coefficient_residual,
    fit_shape,
    probe_config,
    solve_exterior_kernel_probe,
    solve_radial,
    solve_v_equation,
    transform_to_v,
)
from fujita_lab.pde_sim import _core
from fujita_lab.pde_sim.probe import TAIL_FLOOR
from fujita_lab.special_kernels import kernel_qn


def spec(p=2.0, omega=0.0, n=3, m=0.0, geometry=None, amp=1.0, center=0.0, width=1.0, linear=False):
    return ProblemSpec(
        pot=PotentialSpec(omega=omega, n=n),
        reac=ReactionSpec(m=m),
        p=p,
        geometry=geometry or WholeSpace(),
        initial=InitialData(amp, center, width),
        linear=linear,
    )


# ---------------------------------------------------------------------------
# kernels


def test_react_is_exact_flow():
    rng = np.random.default_rng(0)
    u = rng.uniform(0.1, 1.0, 50)
    a = rng.uniform(0.0, 1.0, 50)
    b = rng.uniform(-2.0, 1.0, 50)
    p, dt = 2.7, 0.05
    out = np.empty_like(u)
    assert _core.react(u, out, dt, p, b, a)
    for i in range(u.size):
        ref = integrate.solve_ivp(lambda t, y: b[i] * y + a[i] * y**p, (0, dt), [u[i]], rtol=1e-12, atol=1e-14)
        assert out[i] == pytest.approx(ref.y[0, -1], rel=1e-9)


def test_react_reports_closed_bracket():
    u = np.array([10.0])
    out = np.empty(1)
    assert not _core.react(u, out, 1.0, 2.0, np.zeros(1), np.ones(1))


def test_crank_nicolson_against_dense_solve():
    g = build_grid(3.0, 0.0, 5.0, 41, origin=True, sim=False)
    n = g.di.size
    L = np.diag(g.di) + np.diag(g.lo[1:], -1) + np.diag(g.up[:-1], 1)
    u = np.exp(-g.x_free**2)
    dt = 0.01
    ref = np.linalg.solve(np.eye(n) - 0.5 * dt * L, (np.eye(n) + 0.5 * dt * L) @ u)
    out = np.empty(n)
    _core.crank_nicolson(u, out, g.lo, g.di, g.up, dt, np.empty(n), np.empty(n))
    assert np.allclose(out, ref, rtol=1e-12, atol=1e-15)


def test_operator_is_conservative():
    # weighted column sums vanish away from the outer boundary
    g = build_grid(2.5, 0.0, 10.0, 101, origin=True, sim=False)
    flux_out = g.vol[:-1] * g.up[:-1] - g.vol[1:] * g.lo[1:]
    assert np.max(np.abs(flux_out)) < 1e-12 * np.max(g.vol * g.up)


def test_origin_potential_average():
    x, w = np.polynomial.legendre.leggauss(8)
    eps, R, d = 1e-3, 0.05, 3.0
    ref = R - eps * math.atan(R / eps)  # ∫_0^R r²/(r²+ε²) dr
    got = _core.origin_potential(2.0, eps, d, R, x, w)
    # 8-point panels on a ratio-4 geometric mesh
    assert got == pytest.approx(2.0 * ref / (R**3 / 3), rel=1e-8)


# ---------------------------------------------------------------------------
# solver


def test_linear_matches_kernel_convolution():
    sp = spec(linear=True, amp=1.0, width=1.0)
    cfg = SolverConfig(r_max=30.0, grid_points=1501, t_max=5.0, frame="physical", dt_max=1e-3)
    out = solve_radial(sp, cfg, snapshot_times=(1.0, 5.0), apply_policy=False)
    for t in (1.0, 5.0):
        snap = out.snapshot(t)
        for r in (0.5, 2.0, 4.0):
            ref = integrate.quad(lambda z: kernel_qn(3.0, t, r, z) * sp.initial(z), 1e-12, 25.0, limit=200)[0]
            got = np.interp(r, snap.r, snap.u)
            assert got == pytest.approx(ref, rel=2e-3)


def test_blowup_not_before_ode_time():
    # the spatially uniform ODE u' = u² from the sup bounds the PDE from above
    out = solve_radial(spec(p=2.0, amp=5.0), SolverConfig(t_max=5.0, frame="physical", r_max=20.0, grid_points=401))
    assert out.verdict is Verdict.BLOWUP
    assert out.blowup_time >= 1.0 / 5.0
    assert out.evidence["growth"] > 0


def test_small_data_global_short_run():
    cfg = SolverConfig(t_max=50.0, xi_points=401)
    out = solve_radial(spec(p=3.0, amp=0.1), cfg)
    assert out.frame == "similarity"
    assert out.verdict is Verdict.GLOBAL
    tail = out.t > 10
    assert np.all(out.sup_norm[tail] * (1 + out.t[tail]) ** 1.5 < 0.02)


def test_near_critical_policy():
    out = solve_radial(spec(p=1.67, amp=0.1), SolverConfig(t_max=1.0, frame="physical", r_max=20.0, grid_points=201))
    assert out.policy_undetermined and out.verdict is Verdict.UNDETERMINED
    assert out.raw_verdict is not None


def test_underflow_raises():
    cfg = SolverConfig(t_max=5.0, frame="physical", r_max=20.0, grid_points=201, dt_min=1e-2, dt_init=1e-2)
    with pytest.raises(SolverError):
        solve_radial(spec(p=2.0, amp=50.0), cfg)


def test_boundary_warning():
    with pytest.warns(BoundaryWarning):
        solve_radial(spec(p=3.0, amp=0.1, linear=True), SolverConfig(t_max=4.0, frame="physical", r_max=5.0,
                                                                     grid_points=101), apply_policy=False)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        SolverConfig(decay_window=2.0)
    with pytest.raises(ValueError):
        SolverConfig(frame="lagrangian")
    with pytest.raises(ValueError):
        solve_radial(spec(geometry=Exterior(1.0)), SolverConfig(frame="similarity"))
    with pytest.raises(ValueError):
        Exterior(0.0)
    with pytest.raises(ValueError):
        solve_radial(spec(amp=1.0), SolverConfig(blowup_threshold=0.5, frame="physical", t_max=1.0))


def test_similarity_and_physical_frames_agree():
    sp = spec(p=3.0, amp=0.5)
    a = solve_radial(sp, SolverConfig(t_max=3.0, frame="physical", r_max=30.0, grid_points=1201, dt_max=1e-3),
                     snapshot_times=(3.0,), apply_policy=False)
    b = solve_radial(sp, SolverConfig(t_max=3.0, frame="similarity", xi_points=1201, dt_max=1e-3),
                     snapshot_times=(3.0,), apply_policy=False)
    sa, sb = a.snapshot(3.0), b.snapshot(3.0)
    r = np.linspace(0, 5, 11)
    assert np.allclose(np.interp(r, sa.r, sa.u), np.interp(r, sb.r, sb.u), rtol=2e-3, atol=1e-6)


def test_inverse_square_potential_slows_decay():
    # ω > 0 adds absorption; ω < 0 (above the Hardy threshold) adds growth
    res = {}
    for omega in (-0.2, 0.0, 1.0):
        o = solve_radial(spec(p=3.0, omega=omega, amp=0.1, linear=True),
                         SolverConfig(t_max=4.0, frame="physical", r_max=30.0, grid_points=601), apply_policy=False)
        res[omega] = o.sup_norm[-1]
    assert res[-0.2] > res[0.0] > res[1.0]


# ---------------------------------------------------------------------------
# change of variables


def test_coefficient_residual_vanishes():
    r = np.geomspace(1e-3, 1e3, 50)
    for omega, n in ((3.0, 3), (-0.25, 3), (0.7, 5)):
        assert np.max(np.abs(coefficient_residual(omega, n, r) * r * r)) < 1e-13


def test_v_equation_commutes_with_transform():
    sp = spec(p=2.0, omega=0.75, amp=0.3, center=3.0, width=0.7, geometry=Exterior(1.0))
    cfg = SolverConfig(t_max=2.0, frame="physical", r_max=25.0, grid_points=1201, dt_max=1e-3)
    u = solve_radial(sp, cfg, snapshot_times=(2.0,), apply_policy=False).snapshot(2.0)
    v = solve_v_equation(sp, cfg, snapshot_times=(2.0,)).snapshot(2.0)
    a = alpha_root(0.75, 3)
    tv = transform_to_v(u, a)
    assert np.max(np.abs(tv.u - v.u)) < 1e-3 * np.max(v.u)


def test_v_equation_needs_exterior():
    with pytest.raises(ValueError):
        solve_v_equation(spec(omega=0.75), SolverConfig(t_max=1.0, frame="physical"))


# ---------------------------------------------------------------------------
# kernel probe and lower-bound shapes


def test_probe_dominated_by_free_kernel():
    times = (0.5, 2.0, 8.0)
    pr = solve_exterior_kernel_probe(3.0, 1.0, InitialData(1.0, 4.0, 0.1), times)
    assert np.all(pr.qbar >= -1e-14)
    sel = pr.mask((2.0, 20.0), TAIL_FLOOR)
    assert np.max(pr.qbar[sel] / pr.reference()[sel]) <= 1.02
    # Dirichlet absorption shows up near the hole, not far away
    k = times.index(8.0)
    near = np.argmin(np.abs(pr.r - 2.0))
    far = np.argmin(np.abs(pr.r - 6.0))
    ref = pr.reference()[k]
    assert pr.qbar[k, near] / ref[near] < pr.qbar[k, far] / ref[far]


def test_probe_input_checks():
    with pytest.raises(ValueError):
        solve_exterior_kernel_probe(3.0, 1.0, InitialData(1.0, 1.5, 0.1), (1.0,))
    with pytest.raises(ValueError):
        solve_exterior_kernel_probe(3.0, 1.0, InitialData(1.0, 4.0, 0.8), (1.0,))
    with pytest.raises(ValueError):
        solve_exterior_kernel_probe(3.0, 1.0, InitialData(1.0, 4.0, 0.1), (1e-3,))


def test_probe_config_reach():
    cfg = probe_config(1.0, 5.0, 16.0)
    assert cfg.r_max == pytest.approx(5.0 + 48.0 + 10.0)
    assert not cfg.positivity_cap


def test_linear_exterior_shape_fit():
    sp = spec(p=2.0, geometry=Exterior(1.0), center=3.0, width=0.5, linear=True)
    times = tuple(np.geomspace(2.0, 40.0, 8))
    cfg = SolverConfig(t_max=40.0, frame="physical", r_max=70.0, grid_points=1401)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryWarning)
        out = solve_radial(sp, cfg, snapshot_times=times, apply_policy=False)
    fit = fit_shape(out, t_power=-1.5, log_power=0.0, r_lo=2.0, r_hi=lambda t: 3 * math.sqrt(t))
    assert 0.1 < fit.K < 1.0
    for snap in out.snapshots:
        sel = (snap.r >= 2.0) & (snap.r <= 3 * math.sqrt(snap.t))
        env = fit.envelope(snap.t, snap.r[sel], -1.5, 0.0)
        assert np.all(snap.u[sel] >= env * (1 - 1e-12))
