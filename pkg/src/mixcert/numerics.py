"""Numerical kernels: symmetric eigenvalues, linear solves, group inverse, tail threshold.

The eigensolver and linear solve are thin contracts over LAPACK (via numpy);
the group inverse and the tail-threshold bisection are implemented here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AxiomViolationError,
    DomainError,
    NoConvergenceError,
    NotSymmetricError,
    SingularSystemError,
)

SYM_TOL = 1e-8
AXIOM_TOL = 1e-8
SOLVE_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class GroupInverse:
    """Group inverse A# of A = I - P together with its axiom residuals.

    residuals holds the max-entry norms of (A A# A - A), (A# A A# - A#) and
    (A# A - A A#), each required to be at most 1e-8.
    """

    a_sharp: np.ndarray
    residuals: tuple[float, float, float]


def sym_eigenvalues(S) -> np.ndarray:
    """Eigenvalues of a symmetric matrix, descending.

    Requires max|S - S^T| <= 1e-8; the input is symmetrized exactly before the
    solve so rounding asymmetry cannot leak into the spectrum.
    """
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise NotSymmetricError("expected a square matrix")
    asym = float(np.max(np.abs(S - S.T))) if S.size else 0.0
    if asym > SYM_TOL:
        raise NotSymmetricError(f"asymmetry {asym:.3e} exceeds 1e-8")
    try:
        w = np.linalg.eigvalsh(0.5 * (S + S.T))
    except np.linalg.LinAlgError as exc:
        raise NoConvergenceError(str(exc)) from exc
    return w[::-1].copy()


def solve_linear(A, b) -> np.ndarray:
    """Solve A x = b with partial pivoting; verifies the residual afterwards."""
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(str(exc)) from exc
    resid = float(np.max(np.abs(A @ x - b)))
    if resid > SOLVE_RESIDUAL_TOL * (1.0 + float(np.max(np.abs(b)))):
        raise SingularSystemError(f"solve residual {resid:.3e} too large")
    return x


def group_inverse(P_hat, pi_hat) -> GroupInverse:
    """Group inverse of A = I - P_hat for an ergodic P_hat.

    Computed through the fundamental matrix Z = (I - P_hat + 1 pi_hat)^(-1)
    as A# = Z - 1 pi_hat, then validated against the three defining axioms.
    pi_hat must be the stationary distribution of P_hat (checked to 1e-10).
    """
    P = np.asarray(P_hat, dtype=np.float64)
    pi = np.asarray(pi_hat, dtype=np.float64)
    d = P.shape[0]
    if pi.shape != (d,):
        raise DomainError("pi_hat has wrong length")
    if float(np.max(np.abs(pi @ P - pi))) > 1e-10:
        raise DomainError("pi_hat is not stationary for P_hat to 1e-10")
    ones_pi = np.tile(pi, (d, 1))
    A = np.eye(d) - P
    Z = solve_linear(A + ones_pi, np.eye(d))
    a_sharp = Z - ones_pi
    r1 = float(np.max(np.abs(A @ a_sharp @ A - A)))
    r2 = float(np.max(np.abs(a_sharp @ A @ a_sharp - a_sharp)))
    r3 = float(np.max(np.abs(a_sharp @ A - A @ a_sharp)))
    if max(r1, r2, r3) > AXIOM_TOL:
        raise AxiomViolationError(f"group-inverse residuals ({r1:.2e}, {r2:.2e}, {r3:.2e})")
    return GroupInverse(a_sharp=a_sharp, residuals=(r1, r2, r3))


def _tail_lhs(t: float, n: int, d: int, c: float) -> float:
    if t <= 0.0:
        return math.inf
    x = math.log(2.0 * n / t) / math.log(c)
    levels = max(0.0, math.ceil(x))
    return 2.0 * d * d * (1.0 + levels) * math.exp(-t)


def tail_threshold(n: int, d: int, delta: float, c: float = 1.1) -> float:
    """Smallest t >= 0 with 2 d^2 (1 + ceil(log_c(2n/t))_+) e^(-t) <= delta.

    The left side is non-increasing in t, so the threshold is found by
    bisection after growing an upper bracket geometrically. Absolute
    tolerance 1e-9.
    """
    if n < 2 or d < 2:
        raise DomainError("need n >= 2 and d >= 2")
    if not (0.0 < delta < 1.0):
        raise DomainError("delta must lie in (0, 1)")
    if c <= 1.0:
        raise DomainError("c must exceed 1")
    lo = 0.0
    hi = math.log(2.0 * d * d / delta) + 1.0
    while _tail_lhs(hi, n, d, c) > delta:
        hi *= 4.0
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if _tail_lhs(mid, n, d, c) <= delta:
            hi = mid
        else:
            lo = mid
    return hi
