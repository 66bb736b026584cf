"""Counting statistics of a sample path: visit counts, doublet counts, smoothing, skipping."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chains import SamplePath
from .errors import DomainError, EmptyResultError, PathTooShortError


@dataclass(frozen=True, eq=False)
class PathStatistics:
    """Integer counts and their normalized forms for a path of length n.

    N_first counts visits among the first n-1 observations (the count that
    pairs with doublets), N_full among all n. N_pair[i, j] counts consecutive
    (i, j) transitions; M_hat = N_pair/(n-1) and pi_hat_emp = N_full/n.
    """

    n: int
    d: int
    N_first: np.ndarray
    N_full: np.ndarray
    N_pair: np.ndarray
    M_hat: np.ndarray
    pi_hat_emp: np.ndarray


@dataclass(frozen=True, eq=False)
class SmoothedTransitionEstimate:
    """Laplace-smoothed transition estimate (N_ij + alpha)/(N_i + d*alpha), alpha = 1/d."""

    P_hat: np.ndarray
    alpha: float


def collect_statistics(path: SamplePath) -> PathStatistics:
    """Single left-to-right pass turning a path into counts (exact integer arithmetic)."""
    x = path.states
    n = x.shape[0]
    if n < 2:
        raise PathTooShortError("need at least two observations")
    d = path.d
    N_full = np.bincount(x, minlength=d)
    N_first = np.bincount(x[:-1], minlength=d)
    N_pair = np.bincount(x[:-1] * d + x[1:], minlength=d * d).reshape(d, d)
    return PathStatistics(
        n=n,
        d=d,
        N_first=N_first,
        N_full=N_full,
        N_pair=N_pair,
        M_hat=N_pair / float(n - 1),
        pi_hat_emp=N_full / float(n),
    )


def smoothed_transitions(stats: PathStatistics) -> SmoothedTransitionEstimate:
    """Smoothed estimate P_hat[i, j] = (N_pair[i, j] + 1/d)/(N_first[i] + 1).

    Every entry is strictly positive, so P_hat always defines an ergodic
    chain; an unvisited state gets the uniform row.
    """
    alpha = 1.0 / stats.d
    P_hat = (stats.N_pair + alpha) / (stats.N_first + 1.0)[:, None]
    return SmoothedTransitionEstimate(P_hat=P_hat, alpha=alpha)


def skip_path(path: SamplePath, a: int) -> SamplePath:
    """Every a-th observation (X_a, X_2a, ...); a = 1 returns the path unchanged."""
    if a < 1:
        raise DomainError("skip amount must be a positive integer")
    if a == 1:
        return path
    kept = path.states[a - 1 :: a]
    if kept.shape[0] < 2:
        raise EmptyResultError(f"skipping by {a} leaves fewer than two observations")
    return SamplePath(d=path.d, states=kept.copy())
