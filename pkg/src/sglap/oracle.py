"""Independent brute-force verifiers for the closed forms elsewhere.

Nothing here reuses a formula it is meant to check: spectra come from a
dense symmetric eigensolve of the graph Laplacian, tangents from literally
iterating pulled-back cell triples (in high precision, since each pullback
level multiplies roundoff in the antisymmetric component by 5), and the
unit-interval tangent from fitting the explicit sine solution.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from mpmath import mp, mpf

from . import _kernels
from .address import EventuallyConstantWord, build_level_graph
from .decimation import SpectralEigenfunction
from .errors import ConvergenceError, DomainError
from .tangent import TangentTriple

DENSE_LEVEL_CAP = 6
ORACLE_DPS = 50  # enough headroom for 5^25 noise amplification in tangents


@dataclass(frozen=True, eq=False)
class DenseSpectrum:
    """Eigendecomposition of -Delta_m on interior vertices (Dirichlet)."""

    level: int
    eigenvalues: np.ndarray  # ascending, one per interior vertex
    eigenvectors: np.ndarray  # columns, matching order
    interior_indices: np.ndarray  # rows into the level graph vertex order
    matrix: np.ndarray = field(repr=False, default=None)

    @property
    def count(self) -> int:
        return self.eigenvalues.shape[0]

    def multiplicities(self, tol: float = 1e-8):
        """Group the ascending eigenvalues into (value, multiplicity) runs."""
        groups = []
        for lam in self.eigenvalues:
            if groups and abs(lam - groups[-1][0] / groups[-1][1]) <= tol:
                s, n = groups[-1]
                groups[-1] = (s + lam, n + 1)
            else:
                groups.append((lam, 1))
        return [(s / n, n) for s, n in groups]

    def residual(self) -> float:
        if self.count == 0:
            return 0.0
        defect = self.matrix @ self.eigenvectors - self.eigenvectors * self.eigenvalues
        return float(np.max(np.abs(defect)))


def dense_interior_matrix(level: int):
    """-Delta_m with boundary rows and columns removed, plus the index map."""
    graph = build_level_graph(level)
    interior = np.flatnonzero(graph.interior_mask)
    pos = -np.ones(graph.size, dtype=np.int64)
    pos[interior] = np.arange(interior.size)
    a = np.zeros((interior.size, interior.size))
    for row, x in enumerate(interior):
        a[row, row] = graph.degree[x]
        for y in graph.indices[graph.indptr[x]:graph.indptr[x + 1]]:
            if pos[y] >= 0:
                a[row, pos[y]] -= 1.0
    return a, interior


def dense_dirichlet_spectrum(m: int) -> DenseSpectrum:
    """Full Dirichlet spectrum of -Delta_m by in-repo Jacobi rotations."""
    if m < 0:
        raise DomainError(f"level must be nonnegative, got {m}")
    if m > DENSE_LEVEL_CAP:
        raise DomainError(f"dense solves are capped at level {DENSE_LEVEL_CAP}, got {m}")
    a, interior = dense_interior_matrix(m)
    w, v = _kernels.jacobi_eigh(a)
    spec = DenseSpectrum(m, w, v, interior, a)
    res = spec.residual()
    if res >= 1e-9:
        raise ConvergenceError(f"dense eigensolve residual {res:.3e} at level {m}")
    return spec


def sorted_pairing_gap(a, b) -> float:
    """Worst gap when two spectra are paired in ascending order."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.shape != b.shape:
        raise DomainError(f"multiset sizes differ: {a.shape[0]} vs {b.shape[0]}")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)))


# --- high-precision tangent iteration -------------------------------------

def _mp_swap(i):
    s = [0, 1, 2]
    s[0], s[i] = s[i], s[0]
    return s


def _mp_matvec(m, v):
    return [sum(m[a][b] * v[b] for b in range(3)) for a in range(3)]


def _mp_matmul(m, n):
    return [[sum(m[a][t] * n[t][b] for t in range(3)) for b in range(3)] for a in range(3)]


def _mp_eigen_matrix(i, lam):
    den = (5 - lam) * (2 - lam)
    a0 = [[1, 0, 0],
          [(4 - lam) / den, (4 - lam) / den, 2 / den],
          [(4 - lam) / den, 2 / den, (4 - lam) / den]]
    s = _mp_swap(i)
    return [[a0[s[a]][s[b]] for b in range(3)] for a in range(3)]


def _mp_harmonic_inverse(i):
    third = mpf(1) / 3
    a0inv = [[1, 0, 0],
             [-2 * third, 10 * third, -5 * third],
             [-2 * third, -5 * third, 10 * third]]
    s = _mp_swap(i)
    return [[a0inv[s[a]][s[b]] for b in range(3)] for a in range(3)]


def direct_tangent_limit(u: SpectralEigenfunction, w, m: int):
    """The pulled-back cell triple A_{w_1}^{-1}...A_{w_m}^{-1} u|cell([w]_m).

    This is the defining sequence of the harmonic tangent, iterated with no
    closed-form shortcuts; the reported error is the distance to the m-1
    iterate.  Runs in extended precision because the pullback amplifies the
    antisymmetric roundoff component five-fold per level.
    """
    if isinstance(w, str):
        w = EventuallyConstantWord.parse(w)
    m0 = u.m0
    if m < m0:
        raise DomainError(f"need m >= m0 = {m0}, got {m}")
    with mp.workdps(ORACLE_DPS):
        lam = mpf(u.sequence.lambda_m0)
        pull = [[mpf(1 if a == b else 0) for b in range(3)] for a in range(3)]
        for c in w.truncation(m0):
            pull = _mp_matmul(pull, _mp_harmonic_inverse(c))
        triple = [mpf(float(x)) for x in u.cell_triple(w.truncation(m0))]
        prev = None
        cur = _mp_matvec(pull, triple)
        for t in range(m0 + 1, m + 1):
            root = mp.sqrt(25 - 4 * lam)
            lam = (5 + root) / 2 if t in u.sequence.plus_indices else 2 * lam / (5 + root)
            letter = w.letter(t)
            triple = _mp_matvec(_mp_eigen_matrix(letter, lam), triple)
            pull = _mp_matmul(pull, _mp_harmonic_inverse(letter))
            prev = cur
            cur = _mp_matvec(pull, triple)
        out = TangentTriple(*(float(x) for x in cur))
        err = math.inf if prev is None else float(max(abs(a - b) for a, b in zip(cur, prev)))
    return out, err


# --- unit-interval comparison model ----------------------------------------

def interval_tangent(lam: float, x0: float, f0: float, f1: float) -> np.ndarray:
    """Endpoint values of the tangent line at x0 to the solution of
    -u'' = lam u on [0,1] with u(0)=f0, u(1)=f1.

    Written out from the sine/cosine solution; resonant lam = (pi k)^2 has no
    such interpolant.  Negative lam rides the same formulas with imaginary
    frequency, so everything stays real.
    """
    lam = float(lam)
    x0 = float(x0)
    if not 0.0 <= x0 <= 1.0:
        raise DomainError(f"x0 must lie in [0, 1], got {x0}")
    if lam == 0.0:
        return np.array([float(f0), float(f1)])
    r = cmath.sqrt(lam)
    if lam > 0:
        k = round(r.real / math.pi)
        if k >= 1 and abs(r.real - k * math.pi) < 1e-9:
            raise DomainError(f"lam={lam} is resonant ((pi k)^2 with k={k})")
    s = cmath.sin(r)
    a = cmath.sin((1.0 - x0) * r)
    atil = cmath.cos((1.0 - x0) * r)
    s0 = cmath.sin(x0 * r)
    c0 = cmath.cos(x0 * r)
    b = x0 * r * atil
    left = (f0 * (a + b) + f1 * (s0 - x0 * r * c0)) / s
    right = (f0 * (a - (1.0 - x0) * r * atil) + f1 * (s0 + (1.0 - x0) * r * c0)) / s
    return np.array([left.real, right.real])
