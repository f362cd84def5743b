"""Pure-Python integration kernels.

Mirror of ``_kernels.pyx``; same algorithm, same operation order, so both
backends agree to rounding. Works on plain floats, which beats numpy for
six-component vectors.
"""
import math

import numpy as np

NAME = "python"

CONVERGED = 0
HORIZON = 1
STEP_FAILURE = 2

# Dormand-Prince 5(4)
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = (
    9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0,
)
B1, B3, B4, B5, B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
E1, E3, E4, E5, E6, E7 = (
    71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0,
    -1.0 / 40.0,
)

SAFETY = 0.9
FAC_MIN = 0.2
FAC_MAX = 5.0
PI_ALPHA = 0.17
PI_BETA = 0.04


def rhs6(par, y):
    a1, a2, a3, inertia, k = par
    p, q, r, p1, q1, r1 = y
    u = p1 - p
    v = q1 - q
    w = r1 - r
    kd = k / inertia
    return [
        (k * u - (a3 - a2) * q * r) / a1,
        (k * v - (a1 - a3) * r * p) / a2,
        (k * w - (a2 - a1) * p * q) / a3,
        -kd * u - (q * r1 - r * q1),
        -kd * v - (r * p1 - p * r1),
        -kd * w - (p * q1 - q * p1),
    ]


def _dissipation(k, y):
    u = y[3] - y[0]
    v = y[4] - y[1]
    w = y[5] - y[2]
    return k * (u * u + v * v + w * w)


def dopri_step(par, y, h, rtol, atol, f0=None):
    """One Dormand-Prince step.

    Returns ``(y_new, err, f_new, d_diss)``: ``err`` is the max over
    components of the embedded difference scaled by
    ``atol + rtol * max(|y_i|, |y_new_i|)``; ``f_new`` is the right-hand side
    at ``y_new`` (first stage of the next step); ``d_diss`` is the stage-weighted
    quadrature of ``k |W1 - W|^2`` over the step.
    """
    k = par[4]
    k1 = rhs6(par, y) if f0 is None else f0
    y2 = [y[i] + h * A21 * k1[i] for i in range(6)]
    k2 = rhs6(par, y2)
    y3 = [y[i] + h * (A31 * k1[i] + A32 * k2[i]) for i in range(6)]
    k3 = rhs6(par, y3)
    y4 = [y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]) for i in range(6)]
    k4 = rhs6(par, y4)
    y5 = [y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]) for i in range(6)]
    k5 = rhs6(par, y5)
    y6 = [
        y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i])
        for i in range(6)
    ]
    k6 = rhs6(par, y6)
    yn = [
        y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i])
        for i in range(6)
    ]
    k7 = rhs6(par, yn)
    err = 0.0
    for i in range(6):
        e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
        sc = atol + rtol * max(abs(y[i]), abs(yn[i]))
        err = max(err, abs(e) / sc)
    if not (math.isfinite(err) and all(math.isfinite(v) for v in yn)):
        err = math.inf
    d_diss = h * (
        B1 * _dissipation(k, y)
        + B3 * _dissipation(k, y3)
        + B4 * _dissipation(k, y4)
        + B5 * _dissipation(k, y5)
        + B6 * _dissipation(k, y6)
    )
    return yn, err, k7, d_diss


def _criterion(y, f):
    u = y[3] - y[0]
    v = y[4] - y[1]
    w = y[5] - y[2]
    rel = math.sqrt(u * u + v * v + w * w)
    df = math.sqrt(sum(x * x for x in f))
    return rel + df


def sample_count(t_end, sample_dt):
    n_grid = int(math.floor(t_end / sample_dt + 1e-9))
    tail = t_end - n_grid * sample_dt > 1e-12 * max(1.0, t_end)
    return n_grid + 1 + (1 if tail else 0), n_grid


def integrate(par, y0, rtol, atol, h_init, h_min, h_max, t_end, sample_dt, conv_eps,
              conv_window):
    """Adaptive integration sampled on the grid ``j * sample_dt``.

    Steps are shortened to land exactly on sample times, so recorded states
    are genuine integrator states (no interpolation).

    Returns ``(t, y, diss, status, t_star, n_accept, n_reject)`` with ``t``
    of shape ``(n,)``, ``y`` of shape ``(n, 6)`` and ``diss`` the cumulative
    dissipated energy at each sample.
    """
    n_max, n_grid = sample_count(t_end, sample_dt)
    ts = [0.0]
    ys = [list(y0)]
    ds = [0.0]

    y = [float(v) for v in y0]
    f = rhs6(par, y)
    t = 0.0
    diss = 0.0
    status = HORIZON
    t_star = math.nan
    conv_start = -1.0
    if _criterion(y, f) <= conv_eps:
        conv_start = 0.0
        if conv_window <= 0.0:
            status = CONVERGED
            t_star = 0.0
    h = min(h_init, h_max)
    errold = 1e-4
    n_accept = 0
    n_reject = 0
    j = 1
    window_tol = 1e-9 * sample_dt

    while status == HORIZON and j < n_max:
        target = j * sample_dt if j <= n_grid else t_end
        h_try = min(h, h_max)
        hit = False
        # stretch by up to 1% rather than leave a sliver before the sample
        if t + 1.01 * h_try >= target:
            h_try = target - t
            hit = True
        yn, err, fn, d_diss = dopri_step(par, y, h_try, rtol, atol, f)
        if err <= 1.0:
            n_accept += 1
            fac = max(err, 1e-10) ** PI_ALPHA / errold ** PI_BETA / SAFETY
            fac = min(1.0 / FAC_MIN, max(1.0 / FAC_MAX, fac))
            h_new = min(h_try / fac, h_max)
            errold = max(err, 1e-4)
            h = max(h_new, h) if hit else h_new
            h = min(h, h_max)
            y = yn
            f = fn
            diss += d_diss
            if hit:
                t = target
                ts.append(t)
                ys.append(y)
                ds.append(diss)
                j += 1
                if _criterion(y, f) <= conv_eps:
                    if conv_start < 0.0:
                        conv_start = t
                    if t - conv_start >= conv_window - window_tol:
                        status = CONVERGED
                        t_star = conv_start
                else:
                    conv_start = -1.0
            else:
                t += h_try
        else:
            n_reject += 1
            if math.isfinite(err):
                fac = min(1.0 / FAC_MIN, err ** PI_ALPHA / SAFETY)
            else:
                fac = 1.0 / FAC_MIN
            h = h_try / fac
            if h < h_min:
                status = STEP_FAILURE
                break

    return (
        np.array(ts),
        np.array(ys, dtype=float).reshape(-1, 6),
        np.array(ds),
        status,
        t_star,
        n_accept,
        n_reject,
    )


def rk4(par, y0, h, n_steps):
    """Classical fixed-step RK4; reference solution for accuracy checks."""
    y = [float(v) for v in y0]
    half = 0.5 * h
    sixth = h / 6.0
    for _ in range(n_steps):
        k1 = rhs6(par, y)
        k2 = rhs6(par, [y[i] + half * k1[i] for i in range(6)])
        k3 = rhs6(par, [y[i] + half * k2[i] for i in range(6)])
        k4 = rhs6(par, [y[i] + h * k3[i] for i in range(6)])
        y = [y[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) for i in range(6)]
    return np.array(y)
