"""Numeric kernels with a numba fast path and a pure-numpy fallback.

The active backend is chosen at import time: numba is used when importable
unless the environment variable ``SG_NUMBA`` is set to ``"0"``.  Tests and
benchmarks can flip the backend at runtime with :func:`set_numba`.
"""
from __future__ import annotations

import math
import os

import numpy as np

from .errors import ConvergenceError, DomainError

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


_use_numba = HAS_NUMBA and os.environ.get("SG_NUMBA", "1") != "0"


def using_numba() -> bool:
    return _use_numba


def set_numba(enabled: bool) -> bool:
    """Switch backends; returns the previous setting."""
    global _use_numba
    prev = _use_numba
    _use_numba = bool(enabled) and HAS_NUMBA
    return prev


# ---------------------------------------------------------------------------
# cyclic Jacobi eigensolver for dense symmetric matrices
# ---------------------------------------------------------------------------

def _jacobi_sweeps_numpy(a, v, tol2, max_sweeps):
    n = a.shape[0]
    for sweep in range(max_sweeps):
        off2 = 0.0
        for i in range(n - 1):
            row = a[i, i + 1 :]
            off2 += float(row @ row)
        if off2 <= tol2:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                app, aqq = a[p, p], a[q, q]
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = ap - s * (aq + tau * ap)
                a[:, q] = aq + s * (ap - tau * aq)
                a[p, :] = a[:, p]
                a[q, :] = a[:, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = vp - s * (vq + tau * vp)
                v[:, q] = vq + s * (vp - tau * vq)
    return -1


@njit(cache=False)
def _jacobi_sweeps_numba(a, v, tol2, max_sweeps):  # pragma: no cover - numba
    n = a.shape[0]
    for sweep in range(max_sweeps):
        off2 = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                off2 += a[i, j] * a[i, j]
        if off2 <= tol2:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                sign = 1.0 if theta >= 0.0 else -1.0
                t = sign / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                app = a[p, p]
                aqq = a[q, q]
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = akp - s * (akq + tau * akp)
                    a[k, q] = akq + s * (akp - tau * akq)
                for k in range(n):
                    a[p, k] = a[k, p]
                    a[q, k] = a[k, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = vkp - s * (vkq + tau * vkp)
                    v[k, q] = vkq + s * (vkp - tau * vkq)
    return -1


def jacobi_eigh(a: np.ndarray, tol: float = 1e-14, max_sweeps: int = 60):
    """Full eigendecomposition of a real symmetric matrix by Jacobi rotations.

    Returns (eigenvalues ascending, eigenvectors as columns).
    """
    a = np.array(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError("expected a square matrix")
    n = a.shape[0]
    if n == 0:
        return np.empty(0), np.empty((0, 0))
    if not np.allclose(a, a.T, atol=1e-12):
        raise DomainError("matrix is not symmetric")
    v = np.eye(n)
    scale = max(1.0, float(np.linalg.norm(a)))
    tol2 = (tol * scale) ** 2
    fn = _jacobi_sweeps_numba if _use_numba else _jacobi_sweeps_numpy
    sweeps = fn(a, v, tol2, max_sweeps)
    if sweeps < 0:
        raise ConvergenceError(f"Jacobi sweeps did not converge within {max_sweeps}")
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


# ---------------------------------------------------------------------------
# one refinement step of per-cell triples: child 3*c + letter gets M_letter @ parent
# ---------------------------------------------------------------------------

def _extend_level_numpy(values, mats):
    out = np.empty((3 * values.shape[0], 3))
    for letter in range(3):
        out[letter::3] = values @ mats[letter].T
    return out


@njit(cache=False)
def _extend_level_numba(values, mats):  # pragma: no cover - numba
    ncells = values.shape[0]
    out = np.empty((3 * ncells, 3))
    for c in range(ncells):
        for letter in range(3):
            row = 3 * c + letter
            for i in range(3):
                acc = 0.0
                for j in range(3):
                    acc += mats[letter, i, j] * values[c, j]
                out[row, i] = acc
    return out


def extend_level(values: np.ndarray, mats: np.ndarray) -> np.ndarray:
    values = np.ascontiguousarray(values, dtype=np.float64)
    mats = np.ascontiguousarray(mats, dtype=np.float64)
    fn = _extend_level_numba if _use_numba else _extend_level_numpy
    return fn(values, mats)


# ---------------------------------------------------------------------------
# graph Laplacian  sum_{y ~ x} (u(y) - u(x))  over a CSR adjacency
# ---------------------------------------------------------------------------

def _laplacian_numpy(indptr, indices, degree, vals):
    sums = np.add.reduceat(vals[indices], indptr[:-1])
    return sums - degree * vals


@njit(cache=False)
def _laplacian_numba(indptr, indices, degree, vals):  # pragma: no cover - numba
    n = vals.shape[0]
    out = np.empty(n)
    for x in range(n):
        acc = 0.0
        for k in range(indptr[x], indptr[x + 1]):
            acc += vals[indices[k]]
        out[x] = acc - degree[x] * vals[x]
    return out


def laplacian_apply(indptr, indices, degree, vals) -> np.ndarray:
    vals = np.ascontiguousarray(vals, dtype=np.float64)
    fn = _laplacian_numba if _use_numba else _laplacian_numpy
    return fn(indptr, indices, degree, vals)
