"""Scalar special functions built from the quadratic map psi(z) = z(5 - z).

psi_limit is the decreasing-argument limit of the psi_m approximants; it
converts a renormalized eigenvalue back into the level-j entries of its
generating sequence (argument divided by 5 per level, plus branches included
for free since both quadratic roots satisfy the same forward relation).
upsilon is the tail product scaling tangent and normal-derivative limits;
tau is the same product taken along an explicit sequence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import ConvergenceError, DomainError

# validated stability region for the limit iteration
PSI_DOMAIN_BOUND = 100.0


@dataclass(frozen=True)
class ConvergenceConfig:
    tol: float = 1e-13
    max_iterations: int = 80
    tail_bound_factor: float = 0.1


DEFAULT_CONFIG = ConvergenceConfig()


def psi(z):
    return z * (5.0 - z)


def psi_m(z, m: int) -> float:
    """m-th approximant: psi composed m times on (2/3) 5^-m z."""
    if m < 0:
        raise DomainError(f"composition count must be nonnegative, got {m}")
    x = (2.0 / 3.0) * float(z) / 5.0**m
    for _ in range(m):
        x = x * (5.0 - x)
    if not math.isfinite(x):
        raise DomainError(f"psi iteration overflowed for z={z!r} at m={m}")
    return x


@lru_cache(maxsize=65536)
def _psi_limit(z: float, config: ConvergenceConfig):
    prev = psi_m(z, 0)
    for m in range(1, config.max_iterations + 1):
        cur = psi_m(z, m)
        err = abs(cur - prev)
        if err <= config.tol * max(1.0, abs(cur)):
            return cur, err
        prev = cur
    raise ConvergenceError(f"psi approximants did not settle for z={z!r}")


def psi_limit_with_error(z, config: ConvergenceConfig = DEFAULT_CONFIG):
    """Limit of the approximants together with the last increment.

    The increments shrink by a factor 5 per step (seed error ~ 5^-m z^2), so
    the returned increment bounds the remaining truncation error.
    """
    z = float(z)
    if abs(z) > PSI_DOMAIN_BOUND:
        raise DomainError(
            f"argument {z!r} outside the validated region |z| <= {PSI_DOMAIN_BOUND:g}"
        )
    return _psi_limit(z, config)


def psi_limit(z, config: ConvergenceConfig = DEFAULT_CONFIG) -> float:
    return psi_limit_with_error(z, config)[0]


@lru_cache(maxsize=65536)
def _upsilon(lam: float, config: ConvergenceConfig) -> float:
    head = 2.0 - psi_limit(lam / 5.0, config)
    if head == 0.0:
        raise DomainError(f"tail product has a pole at lambda={lam!r}")
    prod = 1.0 / head
    for j in range(2, config.max_iterations + 2):
        prod *= 1.0 - psi_limit(lam / 5.0**j, config) / 3.0
        # remaining factors are bounded via |lambda_j| <= 5^-j |lambda|,
        # a geometric tail of ratio 1/5
        if abs(lam) / 5.0**j / 3.0 < config.tol * config.tail_bound_factor:
            return prod
    raise ConvergenceError(f"tail product did not converge for lambda={lam!r}")


def upsilon(lam, config: ConvergenceConfig = DEFAULT_CONFIG) -> float:
    """1 / (2 - psi_limit(lam/5)) times prod_{j>=2} (1 - psi_limit(5^-j lam)/3)."""
    return _upsilon(float(lam), config)


_EPS = math.ulp(1.0)


def upsilon_with_error(lam, config: ConvergenceConfig = DEFAULT_CONFIG):
    """Value plus an error proxy: distance to an 8x tighter evaluation, with
    a floating-point floor so the estimate stays positive."""
    val = upsilon(lam, config)
    tight = ConvergenceConfig(config.tol / 8.0, config.max_iterations + 8,
                              config.tail_bound_factor)
    err = abs(val - upsilon(lam, tight)) + 8.0 * _EPS * (1.0 + abs(val))
    return val, err


def tau(k: int, sequence, config: ConvergenceConfig = DEFAULT_CONFIG) -> float:
    """Tail product of an explicit eigenvalue sequence, anchored at level k.

    Equals upsilon(5^-k lambda) for the sequence's renormalized limit; taking
    the sequence's own entries keeps it exact through plus branches near the
    anchor.  Needs k >= m0 so that lambda_{k+1} is defined.
    """
    lam1 = sequence.value(k + 1)
    if lam1 == 2.0:
        raise DomainError(f"tail product undefined at k={k}: lambda_{k + 1} = 2")
    prod = 1.0 / (2.0 - lam1)
    for j in range(2, config.max_iterations + 2):
        term = sequence.value(k + j)
        prod *= 1.0 - term / 3.0
        if abs(term) / 3.0 < config.tol * config.tail_bound_factor:
            return prod
    raise ConvergenceError(f"tail product did not converge at k={k}")
