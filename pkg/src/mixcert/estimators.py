"""Point estimators for the spectral gap and minimum stationary probability.

plugin_estimate is the direct spectral plug-in from doublet frequencies;
bootstrap_estimate improves it for slow chains by doubling a skip amount
until the skipped chain looks fast; theory_bounds evaluates the closed-form
a-priori deviation bounds that hold up to an absolute constant C.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chains import SamplePath
from .errors import DomainError, PathTooShortError
from .numerics import sym_eigenvalues
from .pathstats import PathStatistics, collect_statistics, skip_path

DOUBLING_GAP_THRESHOLD = 0.31


@dataclass(frozen=True, eq=False)
class PluginEstimate:
    """Spectral-gap and pi_min plug-in estimates from one path.

    degenerate is set when some state was never visited; the gap estimate is
    then 0 by convention and no spectrum is reported.
    """

    gamma_hat: float
    pimin_hat: float
    eigenvalues_hat: np.ndarray | None
    degenerate: bool


@dataclass(frozen=True, eq=False)
class BootstrapEstimate:
    """Result of the doubling/skip estimator.

    A is the selected power-of-two skip amount, per_level the (a, gamma_hat(a))
    sequence visited, and gamma_tilde = 1 - (1 - gamma_hat(A))^(1/A).
    """

    gamma_tilde: float
    A: int
    per_level: tuple[tuple[int, float], ...]


@dataclass(frozen=True)
class TheoryBounds:
    """Closed-form deviation bounds and sample-size thresholds.

    All quantities scale with the caller-supplied absolute constant C, which
    the underlying theory does not pin down numerically; defaults are
    therefore indicative, not rigorous.
    """

    C: float
    pimin_dev: float
    gap_dev: float
    L_const: float
    n0: float
    K_gamma: int
    delta_gamma: float


def plugin_estimate(stats: PathStatistics) -> PluginEstimate:
    """Plug-in estimates from path statistics.

    Forms L_hat = Diag(pi_hat)^(-1/2) M_hat Diag(pi_hat)^(-1/2) with the
    empirical occupancy pi_hat, symmetrizes, and sets
    gamma_hat = 1 - min{1, max{lambda_2, |lambda_d|}}.
    """
    pi = stats.pi_hat_emp
    pimin_hat = float(pi.min())
    if pimin_hat == 0.0:
        return PluginEstimate(gamma_hat=0.0, pimin_hat=0.0, eigenvalues_hat=None, degenerate=True)
    root = np.sqrt(pi)
    L_hat = stats.M_hat / np.outer(root, root)
    eigs = sym_eigenvalues(0.5 * (L_hat + L_hat.T))
    slem_hat = max(float(eigs[1]), abs(float(eigs[-1])))
    gamma_hat = 1.0 - min(1.0, slem_hat)
    return PluginEstimate(
        gamma_hat=gamma_hat, pimin_hat=pimin_hat, eigenvalues_hat=eigs, degenerate=False
    )


def bootstrap_estimate(path: SamplePath) -> BootstrapEstimate:
    """Doubling/skip estimator of the spectral gap.

    Evaluates the plug-in on the a-skipped path for a = 1, 2, 4, ... and stops
    at the first a whose estimate exceeds 0.31, or at the largest power of two
    leaving at least two skipped observations. The selected level A is then
    unwound through gamma_tilde = 1 - (1 - gamma_hat(A))^(1/A).
    """
    n = path.n
    if n < 2:
        raise PathTooShortError("need at least two observations")
    per_level: list[tuple[int, float]] = []
    a = 1
    while True:
        gamma_a = plugin_estimate(collect_statistics(skip_path(path, a))).gamma_hat
        per_level.append((a, gamma_a))
        if gamma_a > DOUBLING_GAP_THRESHOLD or a >= n or n // (2 * a) < 2:
            break
        a *= 2
    A = a
    g = min(1.0, max(0.0, per_level[-1][1]))
    gamma_tilde = 1.0 - (1.0 - g) ** (1.0 / A)
    return BootstrapEstimate(gamma_tilde=gamma_tilde, A=A, per_level=tuple(per_level))


def theory_bounds(
    n: int,
    d: int,
    delta: float,
    gap_guess: float,
    pimin_guess: float,
    C: float = 1.0,
    *,
    epsilon: float,
) -> TheoryBounds:
    """Evaluate the a-priori deviation bounds and the doubling sample threshold.

    gap_guess and pimin_guess stand in for the unknown true values; epsilon is
    the target relative accuracy entering the sample-size constant. Natural
    logarithms are used throughout.
    """
    if n < 2 or d < 2:
        raise DomainError("need n >= 2 and d >= 2")
    if not (0.0 < delta < 1.0):
        raise DomainError("delta must lie in (0, 1)")
    if not (0.0 < gap_guess <= 1.0) or not (0.0 < pimin_guess < 1.0):
        raise DomainError("gap_guess in (0, 1] and pimin_guess in (0, 1) required")
    if C <= 0.0 or not (0.0 < epsilon < 1.0):
        raise DomainError("C > 0 and epsilon in (0, 1) required")
    g, p = gap_guess, pimin_guess
    log_inv = math.log(1.0 / (p * delta))
    pimin_dev = C * (math.sqrt(p * log_inv / (g * n)) + log_inv / (g * n))
    gap_dev = C * math.sqrt(math.log(d / delta) * math.log(n / (p * delta)) / (p * g * n))
    K_gamma = int(math.floor(math.log2(1.0 / g)))
    delta_gamma = delta / (K_gamma + 1)
    lead = 3.0 * (16.0 * math.sqrt(2.0)) ** 2  # = 1536
    L_const = (
        lead
        * math.log(d * (K_gamma + 1) / delta)
        * math.log(lead * C * C * (K_gamma + 1) / (epsilon**2 * p**2 * g * delta))
    )
    n0 = L_const / (p * g * epsilon**2)
    return TheoryBounds(
        C=C,
        pimin_dev=pimin_dev,
        gap_dev=gap_dev,
        L_const=L_const,
        n0=n0,
        K_gamma=K_gamma,
        delta_gamma=delta_gamma,
    )
