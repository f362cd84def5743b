# cython: language_level=3
"""Compiled integration kernels; operation-for-operation twin of _pykernels."""
from libc.math cimport fabs, sqrt, pow, floor, isfinite, INFINITY, NAN

import numpy as np

NAME = "cython"

cdef enum:
    _CONVERGED = 0
    _HORIZON = 1
    _STEP_FAILURE = 2

CONVERGED = _CONVERGED
HORIZON = _HORIZON
STEP_FAILURE = _STEP_FAILURE

cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0

cdef double SAFETY = 0.9
cdef double FAC_MIN = 0.2
cdef double FAC_MAX = 5.0
cdef double PI_ALPHA = 0.17
cdef double PI_BETA = 0.04


cdef struct Params:
    double a1, a2, a3, inertia, k


cdef inline void _rhs(const Params* P, const double* y, double* out) noexcept nogil:
    cdef double p = y[0], q = y[1], r = y[2], p1 = y[3], q1 = y[4], r1 = y[5]
    cdef double u = p1 - p, v = q1 - q, w = r1 - r
    cdef double k = P.k
    cdef double kd = k / P.inertia
    out[0] = (k * u - (P.a3 - P.a2) * q * r) / P.a1
    out[1] = (k * v - (P.a1 - P.a3) * r * p) / P.a2
    out[2] = (k * w - (P.a2 - P.a1) * p * q) / P.a3
    out[3] = -kd * u - (q * r1 - r * q1)
    out[4] = -kd * v - (r * p1 - p * r1)
    out[5] = -kd * w - (p * q1 - q * p1)


cdef inline double _diss(double k, const double* y) noexcept nogil:
    cdef double u = y[3] - y[0], v = y[4] - y[1], w = y[5] - y[2]
    return k * (u * u + v * v + w * w)


cdef double _step(const Params* P, const double* y, const double* k1, double h,
                  double rtol, double atol, double* yn, double* k7,
                  double* d_diss) noexcept nogil:
    cdef double k2[6]
    cdef double k3[6]
    cdef double k4[6]
    cdef double k5[6]
    cdef double k6[6]
    cdef double ys[6]
    cdef double y3[6]
    cdef double y4[6]
    cdef double y5[6]
    cdef double y6[6]
    cdef int i
    cdef double e, sc, err, ratio, a, b
    cdef double kk = P.k

    for i in range(6):
        ys[i] = y[i] + h * A21 * k1[i]
    _rhs(P, ys, k2)
    for i in range(6):
        y3[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i])
    _rhs(P, y3, k3)
    for i in range(6):
        y4[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
    _rhs(P, y4, k4)
    for i in range(6):
        y5[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
    _rhs(P, y5, k5)
    for i in range(6):
        y6[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i]
                            + A65 * k5[i])
    _rhs(P, y6, k6)
    for i in range(6):
        yn[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i]
                            + B6 * k6[i])
    _rhs(P, yn, k7)

    err = 0.0
    for i in range(6):
        e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                 + E7 * k7[i])
        a = fabs(y[i])
        b = fabs(yn[i])
        sc = atol + rtol * (a if a >= b else b)
        ratio = fabs(e) / sc
        if ratio > err:
            err = ratio
    if not isfinite(err):
        err = INFINITY
    for i in range(6):
        if not isfinite(yn[i]):
            err = INFINITY
    d_diss[0] = h * (B1 * _diss(kk, y) + B3 * _diss(kk, y3) + B4 * _diss(kk, y4)
                     + B5 * _diss(kk, y5) + B6 * _diss(kk, y6))
    return err


cdef inline double _criterion(const double* y, const double* f) noexcept nogil:
    cdef double u = y[3] - y[0], v = y[4] - y[1], w = y[5] - y[2]
    cdef double s = 0.0
    cdef int i
    for i in range(6):
        s = s + f[i] * f[i]
    return sqrt(u * u + v * v + w * w) + sqrt(s)


cdef Params _params(par):
    cdef Params P
    P.a1, P.a2, P.a3, P.inertia, P.k = [float(v) for v in par]
    return P


def rhs6(par, y):
    cdef Params P = _params(par)
    cdef double yy[6]
    cdef double out[6]
    cdef int i
    for i in range(6):
        yy[i] = float(y[i])
    _rhs(&P, yy, out)
    return [out[i] for i in range(6)]


def dopri_step(par, y, double h, double rtol, double atol, f0=None):
    cdef Params P = _params(par)
    cdef double yy[6]
    cdef double k1[6]
    cdef double yn[6]
    cdef double k7[6]
    cdef double dd
    cdef int i
    for i in range(6):
        yy[i] = float(y[i])
    if f0 is None:
        _rhs(&P, yy, k1)
    else:
        for i in range(6):
            k1[i] = float(f0[i])
    err = _step(&P, yy, k1, h, rtol, atol, yn, k7, &dd)
    return [yn[i] for i in range(6)], err, [k7[i] for i in range(6)], dd


def sample_count(double t_end, double sample_dt):
    cdef long n_grid = <long>floor(t_end / sample_dt + 1e-9)
    cdef bint tail = t_end - n_grid * sample_dt > 1e-12 * (t_end if t_end > 1.0 else 1.0)
    return n_grid + 1 + (1 if tail else 0), n_grid


def integrate(par, y0, double rtol, double atol, double h_init, double h_min,
              double h_max, double t_end, double sample_dt, double conv_eps,
              double conv_window):
    cdef Params P = _params(par)
    n_max_py, n_grid_py = sample_count(t_end, sample_dt)
    cdef long n_max = n_max_py, n_grid = n_grid_py
    ts_arr = np.empty(n_max)
    ys_arr = np.empty((n_max, 6))
    ds_arr = np.empty(n_max)
    cdef double[::1] ts = ts_arr
    cdef double[:, ::1] ys = ys_arr
    cdef double[::1] ds = ds_arr

    cdef double y[6]
    cdef double f[6]
    cdef double yn[6]
    cdef double fn[6]
    cdef double t = 0.0, diss = 0.0, d_diss = 0.0
    cdef double h, h_try, h_new, err, fac, errold = 1e-4, target
    cdef double conv_start = -1.0, t_star = NAN
    cdef double window_tol = 1e-9 * sample_dt
    cdef int status = _HORIZON
    cdef long n_accept = 0, n_reject = 0, j = 1, count = 1
    cdef bint hit
    cdef int i

    for i in range(6):
        y[i] = float(y0[i])
        ys[0, i] = y[i]
    ts[0] = 0.0
    ds[0] = 0.0
    _rhs(&P, y, f)
    if _criterion(y, f) <= conv_eps:
        conv_start = 0.0
        if conv_window <= 0.0:
            status = _CONVERGED
            t_star = 0.0
    h = h_init if h_init < h_max else h_max

    with nogil:
        while status == _HORIZON and j < n_max:
            target = j * sample_dt if j <= n_grid else t_end
            h_try = h if h < h_max else h_max
            hit = False
            if t + 1.01 * h_try >= target:
                h_try = target - t
                hit = True
            err = _step(&P, y, f, h_try, rtol, atol, yn, fn, &d_diss)
            if err <= 1.0:
                n_accept += 1
                fac = pow(err if err > 1e-10 else 1e-10, PI_ALPHA) / pow(errold, PI_BETA) / SAFETY
                if fac < 1.0 / FAC_MAX:
                    fac = 1.0 / FAC_MAX
                if fac > 1.0 / FAC_MIN:
                    fac = 1.0 / FAC_MIN
                h_new = h_try / fac
                if h_new > h_max:
                    h_new = h_max
                errold = err if err > 1e-4 else 1e-4
                if hit:
                    if h_new > h:
                        h = h_new
                else:
                    h = h_new
                if h > h_max:
                    h = h_max
                for i in range(6):
                    y[i] = yn[i]
                    f[i] = fn[i]
                diss = diss + d_diss
                if hit:
                    t = target
                    ts[count] = t
                    for i in range(6):
                        ys[count, i] = y[i]
                    ds[count] = diss
                    count += 1
                    j += 1
                    if _criterion(y, f) <= conv_eps:
                        if conv_start < 0.0:
                            conv_start = t
                        if t - conv_start >= conv_window - window_tol:
                            status = _CONVERGED
                            t_star = conv_start
                    else:
                        conv_start = -1.0
                else:
                    t = t + h_try
            else:
                n_reject += 1
                if isfinite(err):
                    fac = pow(err, PI_ALPHA) / SAFETY
                    if fac > 1.0 / FAC_MIN:
                        fac = 1.0 / FAC_MIN
                else:
                    fac = 1.0 / FAC_MIN
                h = h_try / fac
                if h < h_min:
                    status = _STEP_FAILURE
                    break

    return (ts_arr[:count].copy(), ys_arr[:count].copy(), ds_arr[:count].copy(),
            status, t_star, n_accept, n_reject)


def rk4(par, y0, double h, long n_steps):
    cdef Params P = _params(par)
    cdef double y[6]
    cdef double k1[6]
    cdef double k2[6]
    cdef double k3[6]
    cdef double k4[6]
    cdef double tmp[6]
    cdef double half = 0.5 * h, sixth = h / 6.0
    cdef long n
    cdef int i
    for i in range(6):
        y[i] = float(y0[i])
    with nogil:
        for n in range(n_steps):
            _rhs(&P, y, k1)
            for i in range(6):
                tmp[i] = y[i] + half * k1[i]
            _rhs(&P, tmp, k2)
            for i in range(6):
                tmp[i] = y[i] + half * k2[i]
            _rhs(&P, tmp, k3)
            for i in range(6):
                tmp[i] = y[i] + h * k3[i]
            _rhs(&P, tmp, k4)
            for i in range(6):
                y[i] = y[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    return np.array([y[i] for i in range(6)])
