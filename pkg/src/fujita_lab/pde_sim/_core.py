"""Compiled kernels of the radial solver.

Grid values live on nodes; node i owns the control volume
[x_i - h/2, x_i + h/2] clipped to the domain.  The diffusion operator is

    (L u)_i = [f_{i+1/2}(u_{i+1} - u_i) - f_{i-1/2}(u_i - u_{i-1})] / (h vol_i)

with f the weight at faces and vol_i the weighted cell volume.  The weight is
x^{d-1} in the physical frame and x^{d-1} exp(x²/4) in the similarity frame.
"""

from __future__ import annotations

import math

import numpy as np

from .._jit import njit

# packed scalar parameters
P_P, P_OMEGA, P_EPS, P_C1, P_M, P_KAPPA, P_D, P_LINEAR = range(8)
N_PARAMS = 8

ST_DONE, ST_THRESHOLD, ST_FULL, ST_ODE_BLOWUP, ST_UNDERFLOW = range(5)


@njit
def origin_potential(omega, eps, d, R, glx, glw):
    """Average of ω/(r²+ε²) over the ball of radius R, weight r^{d-1}."""
    if omega == 0.0:
        return 0.0
    total = 0.0
    b = R
    floor = 1e-8 * min(eps, R)
    # geometric panels resolve the ε-scale peak at r = 0
    while b > floor:
        a = 0.25 * b
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        for k in range(glx.size):
            r = mid + half * glx[k]
            total += glw[k] * half * r ** (d - 1.0) / (r * r + eps * eps)
        b = a
    # remaining sliver [0, b]: integrand ~ r^{d-1}/ε²
    total += b**d / (d * eps * eps)
    return omega * total / (R**d / d)


@njit
def fill_coefficients(x, s, sim, prm, origin_R, glx, glw, b, a):
    """b = -V_eff, a = reaction coefficient at nodes x, time s."""
    omega = prm[P_OMEGA]
    eps = prm[P_EPS]
    c1 = prm[P_C1]
    m = prm[P_M]
    kappa = prm[P_KAPPA]
    linear = prm[P_LINEAR] != 0.0
    if sim:
        scale = math.exp(s)
        stretch = math.exp(0.5 * s)
    else:
        scale = 1.0
        stretch = 1.0
    for i in range(x.size):
        r = x[i] * stretch
        b[i] = -scale * omega / (r * r + eps * eps)
        if linear:
            a[i] = 0.0
        else:
            ai = c1
            if m != 0.0:
                ai *= (1.0 + r * r) ** (0.5 * m)
            if kappa != 0.0:
                ai *= r**kappa
            a[i] = scale * ai
    if origin_R > 0.0:
        b[0] = -scale * origin_potential(omega, eps, prm[P_D], origin_R * stretch, glx, glw)


@njit
def react(u, out, dt, p, b, a):
    """Exact flow of u' = b u + a u^p over dt; False if the bracket vanishes."""
    q = p - 1.0
    for i in range(u.size):
        ui = u[i]
        if ui <= 0.0:
            out[i] = 0.0
            continue
        if a[i] == 0.0:
            out[i] = ui if b[i] == 0.0 else ui * math.exp(b[i] * dt)
            continue
        x = q * b[i] * dt
        if abs(x) > 1e-12:
            g = dt * math.expm1(x) / x
        else:
            g = dt * (1.0 + 0.5 * x)
        z = q * a[i] * ui**q * g
        if z >= 1.0:
            return False
        eb = math.exp(b[i] * dt)
        if z > 0.0:
            out[i] = eb * ui * (1.0 - z) ** (-1.0 / q)
        else:
            out[i] = eb * ui
    return True


@njit
def crank_nicolson(u, out, lo, di, up, dt, cp, dp):
    """(I - dt/2 L) out = (I + dt/2 L) u, Thomas algorithm."""
    n = u.size
    h = 0.5 * dt
    for i in range(n):
        acc = u[i] + h * di[i] * u[i]
        if i > 0:
            acc += h * lo[i] * u[i - 1]
        if i < n - 1:
            acc += h * up[i] * u[i + 1]
        dp[i] = acc
    # forward sweep
    beta = 1.0 - h * di[0]
    cp[0] = (-h * up[0]) / beta if n > 1 else 0.0
    dp[0] = dp[0] / beta
    for i in range(1, n):
        sub = -h * lo[i]
        beta = (1.0 - h * di[i]) - sub * cp[i - 1]
        if i < n - 1:
            cp[i] = (-h * up[i]) / beta
        dp[i] = (dp[i] - sub * dp[i - 1]) / beta
    out[n - 1] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        out[i] = dp[i] - cp[i] * out[i + 1]


@njit
def _sup(u):
    s = 0.0
    for i in range(u.size):
        if u[i] > s:
            s = u[i]
    return s


@njit
def march(u, x, lo, di, up, prm, origin_R, sim, s, s_stop, dt, dt_max, dt_min, cap,
          threshold, rtol, max_rec, tr_s, tr_sup, tr_dt, glx, glw):
    """Advance u in place from s toward s_stop by Strang splitting.

    Returns (status, s, dt, n_recorded).
    """
    n = u.size
    p = prm[P_P]
    q = p - 1.0
    u1 = np.empty(n)
    u2 = np.empty(n)
    b = np.empty(n)
    a = np.empty(n)
    cp = np.empty(n)
    dp = np.empty(n)
    if not sim:
        fill_coefficients(x, s, sim, prm, origin_R, glx, glw, b, a)
    nrec = 0
    tol = 1e-13 * max(1.0, abs(s_stop))
    while True:
        if s >= s_stop - tol:
            return ST_DONE, s, dt, nrec
        if nrec >= max_rec:
            return ST_FULL, s, dt, nrec
        h = min(dt, dt_max, cap, s_stop - s)
        if sim:
            fill_coefficients(x, s, sim, prm, origin_R, glx, glw, b, a)
        # keep the reaction and the linear growth per step moderate
        rate = 0.0
        bpos = 0.0
        for i in range(n):
            if a[i] > 0.0 and u[i] > 0.0:
                ri = a[i] * u[i] ** q
                if ri > rate:
                    rate = ri
            if b[i] > bpos:
                bpos = b[i]
        if rate > 0.0:
            h = min(h, rtol / rate)
        if bpos > 0.0:
            h = min(h, 0.5 / bpos)
        if h < dt_min:
            return ST_UNDERFLOW, s, dt, nrec
        while True:
            if sim:
                fill_coefficients(x, s + 0.25 * h, sim, prm, origin_R, glx, glw, b, a)
            ok = react(u, u1, 0.5 * h, p, b, a)
            if ok:
                crank_nicolson(u1, u2, lo, di, up, h, cp, dp)
                if sim:
                    fill_coefficients(x, s + 0.75 * h, sim, prm, origin_R, glx, glw, b, a)
                ok = react(u2, u1, 0.5 * h, p, b, a)
            if ok:
                break
            h *= 0.5
            if h < dt_min:
                # the ODE bracket closes even for the smallest admissible step
                return ST_ODE_BLOWUP, s, dt, nrec
        for i in range(n):
            u[i] = u1[i]
        s += h
        sup = _sup(u)
        tr_s[nrec] = s
        tr_sup[nrec] = sup
        tr_dt[nrec] = h
        nrec += 1
        if sup > threshold:
            return ST_THRESHOLD, s, h, nrec
        dt = min(max(dt, 1.25 * h), dt_max)
