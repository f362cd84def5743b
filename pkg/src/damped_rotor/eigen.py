"""Dense nonsymmetric eigenvalues for small real matrices.

Balancing, Householder reduction to upper Hessenberg form, then the Francis
implicit double-shift QR iteration with deflation on small subdiagonals.
Eigenvalues only; no vectors are accumulated.
"""
from __future__ import annotations

import math

import numpy as np

RADIX = 2.0
EPS = np.finfo(float).eps
ITS_PER_EIGENVALUE = 30


class EigenvalueConvergenceError(RuntimeError):
    def __init__(self, message, matrix=None):
        super().__init__(message)
        self.matrix = matrix


def balance(a: np.ndarray) -> np.ndarray:
    """Diagonal similarity scaling by powers of two so that row and column
    norms are comparable. Exact in floating point; returns a new array."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    sqrdx = RADIX * RADIX
    done = False
    while not done:
        done = True
        for i in range(n):
            c = float(np.sum(np.abs(a[:, i])) - abs(a[i, i]))
            r = float(np.sum(np.abs(a[i, :])) - abs(a[i, i]))
            if c == 0.0 or r == 0.0:
                continue
            g = r / RADIX
            f = 1.0
            s = c + r
            while c < g:
                f *= RADIX
                c *= sqrdx
            g = r * RADIX
            while c > g:
                f /= RADIX
                c /= sqrdx
            if (c + r) / f < 0.95 * s:
                done = False
                a[i, :] /= f
                a[:, i] *= f
    return a


def hessenberg(a: np.ndarray) -> np.ndarray:
    """Householder similarity reduction to upper Hessenberg form."""
    h = np.array(a, dtype=float)
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k].copy()
        xmax = float(np.max(np.abs(x)))
        if xmax == 0.0:
            continue
        # scaled so the norm neither underflows nor overflows
        x /= xmax
        sigma = float(np.linalg.norm(x))
        alpha = -math.copysign(sigma, x[0])
        v = x
        v[0] -= alpha
        alpha *= xmax
        vnorm = float(np.linalg.norm(v))
        if vnorm == 0.0:
            continue
        v /= vnorm
        h[k + 1:, :] -= 2.0 * np.outer(v, v @ h[k + 1:, :])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v)
        h[k + 1, k] = alpha
        h[k + 2:, k] = 0.0
    return h


def hqr(h: np.ndarray) -> np.ndarray:
    """Eigenvalues of an upper Hessenberg matrix by Francis double-shift QR."""
    a = np.array(h, dtype=float)
    n = a.shape[0]
    wr = np.zeros(n)
    wi = np.zeros(n)
    anorm = 0.0
    for i in range(n):
        for j in range(max(i - 1, 0), n):
            anorm += abs(a[i, j])
    max_its = ITS_PER_EIGENVALUE * n
    # norm-wise floor: a subdiagonal this small is zero to backward error eps |H|
    floor = EPS * anorm

    nn = n - 1
    t = 0.0
    while nn >= 0:
        its = 0
        while True:
            # deflate at a negligible subdiagonal
            l = nn
            while l >= 1:
                s = abs(a[l - 1, l - 1]) + abs(a[l, l])
                if s == 0.0:
                    s = anorm
                if abs(a[l, l - 1]) + s == s or abs(a[l, l - 1]) <= floor:
                    a[l, l - 1] = 0.0
                    break
                l -= 1
            x = a[nn, nn]
            if l == nn:
                wr[nn] = x + t
                wi[nn] = 0.0
                nn -= 1
                break
            y = a[nn - 1, nn - 1]
            w = a[nn, nn - 1] * a[nn - 1, nn]
            if l == nn - 1:
                p = 0.5 * (y - x)
                q = p * p + w
                z = math.sqrt(abs(q))
                x += t
                if q >= 0.0:
                    z = p + math.copysign(z, p)
                    wr[nn - 1] = wr[nn] = x + z
                    if z != 0.0:
                        wr[nn] = x - w / z
                    wi[nn - 1] = wi[nn] = 0.0
                else:
                    wr[nn - 1] = wr[nn] = x + p
                    wi[nn - 1] = -z
                    wi[nn] = z
                nn -= 2
                break

            if its == max_its:
                raise EigenvalueConvergenceError(
                    f"QR iteration did not converge after {max_its} iterations", matrix=h
                )
            if its and its % 10 == 0:
                # exceptional shift
                t += x
                for i in range(nn + 1):
                    a[i, i] -= x
                s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
                x = y = 0.75 * s
                w = -0.4375 * s * s
            its += 1

            # look for two consecutive small subdiagonal elements
            m = nn - 2
            while m >= l:
                z = a[m, m]
                r = x - z
                s = y - z
                p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
                q = a[m + 1, m + 1] - z - r - s
                r = a[m + 2, m + 1]
                s = abs(p) + abs(q) + abs(r)
                p /= s
                q /= s
                r /= s
                if m == l:
                    break
                u = abs(a[m, m - 1]) * (abs(q) + abs(r))
                v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
                if u + v == v:
                    break
                m -= 1
            for i in range(m + 2, nn + 1):
                a[i, i - 2] = 0.0
                if i != m + 2:
                    a[i, i - 3] = 0.0

            # double-shift QR sweep on rows l..nn, columns m..nn
            for k in range(m, nn):
                if k != m:
                    p = a[k, k - 1]
                    q = a[k + 1, k - 1]
                    r = a[k + 2, k - 1] if k != nn - 1 else 0.0
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0.0:
                        p /= x
                        q /= x
                        r /= x
                s = math.copysign(math.sqrt(p * p + q * q + r * r), p)
                if s == 0.0:
                    continue
                if k == m:
                    if l != m:
                        a[k, k - 1] = -a[k, k - 1]
                else:
                    a[k, k - 1] = -s * x
                p += s
                x = p / s
                y = q / s
                z = r / s
                q /= p
                r /= p
                for j in range(k, nn + 1):
                    p = a[k, j] + q * a[k + 1, j]
                    if k != nn - 1:
                        p += r * a[k + 2, j]
                        a[k + 2, j] -= p * z
                    a[k + 1, j] -= p * y
                    a[k, j] -= p * x
                mmin = nn if nn < k + 3 else k + 3
                for i in range(l, mmin + 1):
                    p = x * a[i, k] + y * a[i, k + 1]
                    if k != nn - 1:
                        p += z * a[i, k + 2]
                        a[i, k + 2] -= p * r
                    a[i, k + 1] -= p * q
                    a[i, k] -= p
    return wr + 1j * wi


def sort_eigenvalues(w) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    order = np.lexsort((w.imag, w.real))
    return w[order]


def eigenvalues(m) -> np.ndarray:
    """Eigenvalues of a real square matrix, sorted by real part then imaginary part."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"square matrix required, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    if m.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    if m.shape[0] == 1:
        return np.array([complex(m[0, 0])])
    if not np.any(m):
        return np.zeros(m.shape[0], dtype=complex)
    # exact power-of-two rescales, before and after balancing, keep the QR
    # products clear of under/overflow
    e1 = _exponent(m)
    b = balance(np.ldexp(m, -e1))
    e2 = _exponent(b)
    w = hqr(hessenberg(np.ldexp(b, -e2)))
    e = e1 + e2
    return sort_eigenvalues(np.ldexp(w.real, e) + 1j * np.ldexp(w.imag, e))


def _exponent(m: np.ndarray) -> int:
    return math.frexp(float(np.max(np.abs(m))))[1]


def eigenvalues6(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.shape != (6, 6):
        raise ValueError(f"6x6 matrix required, got shape {m.shape}")
    return eigenvalues(m)
