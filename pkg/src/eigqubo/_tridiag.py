"""Dense symmetric eigensolver: Householder tridiagonalization + implicit QL.

Kept separate from :mod:`eigqubo.spectral` so the numba kernel compiles once
and is cached on disk.
"""
from __future__ import annotations

import math

import numba
import numpy as np


def householder_tridiagonalize(a: np.ndarray, want_vectors: bool = True):
    """Reduce symmetric ``a`` to tridiagonal form ``T = Z^T a Z``.

    Returns ``(d, e, z)`` with ``d`` the diagonal, ``e`` the subdiagonal padded
    with a trailing zero to length n, and ``z`` the orthogonal transform (or
    ``None`` when ``want_vectors`` is false).
    """
    a = np.array(a, dtype=np.float64, copy=True)
    n = a.shape[0]
    z = np.eye(n) if want_vectors else None
    for k in range(n - 2):
        x = a[k + 1:, k]
        xnorm = np.linalg.norm(x)
        if xnorm == 0.0:
            continue
        alpha = -xnorm if x[0] >= 0 else xnorm
        v = x.copy()
        v[0] -= alpha
        vnorm = np.linalg.norm(v)
        if vnorm == 0.0:
            continue
        v /= vnorm
        sub = a[k + 1:, k + 1:]
        p = sub @ v
        w = 2.0 * (p - (v @ p) * v)
        sub -= np.column_stack((v, w)) @ np.vstack((w, v))
        a[k + 1:, k] = 0.0
        a[k, k + 1:] = 0.0
        a[k + 1, k] = alpha
        a[k, k + 1] = alpha
        if z is not None:
            zs = z[:, k + 1:]
            zs -= np.outer(zs @ v, 2.0 * v)
    d = np.diagonal(a).copy()
    e = np.zeros(n)
    if n > 1:
        e[: n - 1] = np.diagonal(a, -1)
    return d, e, z


@numba.njit(cache=True)
def _hypot(a, b):
    return math.sqrt(a * a + b * b) if a != 0.0 or b != 0.0 else 0.0


@numba.njit(cache=True)
def implicit_ql(d, e, zt, want_vectors, max_iter):
    """Diagonalize a symmetric tridiagonal matrix in place.

    ``d``/``e`` hold diagonal and subdiagonal (``e[n-1]`` unused). Rotations
    are accumulated into the *rows* of ``zt`` (the transposed basis, kept
    row-major so each rotation touches two contiguous rows) when
    ``want_vectors``.
    Returns the total number of QL sweeps, or -1 when ``max_iter`` sweeps
    were exhausted.
    """
    n = d.shape[0]
    eps = np.finfo(np.float64).eps
    sweeps = 0
    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            if sweeps >= max_iter:
                return -1
            sweeps += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = _hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = _hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if want_vectors:
                    for k in range(zt.shape[1]):
                        f = zt[i + 1, k]
                        zt[i + 1, k] = s * zt[i, k] + c * f
                        zt[i, k] = c * zt[i, k] - s * f
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return sweeps


def symmetric_eig(a: np.ndarray, want_vectors: bool = True, max_sweeps: int | None = None):
    """Eigenvalues (and eigenvectors as columns) of a symmetric matrix.

    Returns ``(w, v, ok)``; ``ok`` is False when the sweep cap was hit, in
    which case ``w``/``v`` hold the partially converged state.
    """
    n = a.shape[0]
    if max_sweeps is None:
        max_sweeps = 100 * n
    d, e, z = householder_tridiagonalize(a, want_vectors)
    zt = np.ascontiguousarray(z.T) if z is not None else np.zeros((0, 0))
    status = implicit_ql(d, e, zt, want_vectors, max_sweeps)
    return d, (zt.T if want_vectors else None), status >= 0
