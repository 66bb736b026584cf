"""Fully data-dependent confidence intervals from a single sample path.

empirical_intervals runs the certificate pipeline: smoothed transition
estimates, group inverse of I - P_hat, stationary solve, spectrum of the
symmetrized estimated operator, entrywise transition error bounds, and the
derived deviation bounds for the stationary law and the spectral gap.
combined_intervals intersects those intervals with observable plug-in
deviation bounds, and stopping_rule evaluates them along doubling prefixes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .chains import LN2, SamplePath, _stationary_of_matrix
from .errors import DomainError, MixcertError, SourceExhaustedError
from .estimators import plugin_estimate
from .numerics import group_inverse, sym_eigenvalues, tail_threshold
from .pathstats import collect_statistics, smoothed_transitions

TAIL_GROWTH_C = 1.1


@dataclass(frozen=True, eq=False)
class EmpiricalCertificate:
    """All intermediate quantities of one interval computation.

    t_hat is the tail threshold, B_hat the entrywise transition error bounds,
    kappa_hat the relative sensitivity of the stationary law read off the
    group inverse, b_hat = kappa_hat * max B_hat a uniform bound on
    |pi_hat_i - pi_i|, rho_hat the square-root ratio bound, and w_hat the
    spectral-gap deviation bound (rho_hat and w_hat are +inf when b_hat
    cannot be separated from some pi_hat_i).
    """

    n: int
    d: int
    delta: float
    t_hat: float
    B_hat: np.ndarray
    kappa_hat: float
    b_hat: float
    rho_hat: float
    w_hat: float
    pi_hat: np.ndarray
    gamma_hat: float
    eigenvalues_hat: np.ndarray
    group_inverse_residuals: tuple[float, float, float]


@dataclass(frozen=True, eq=False)
class CombinedIntervals:
    """Intersection of the certificate intervals with plug-in deviation intervals.

    Valid at confidence 1 - 2*delta, conditional on the supplied absolute
    constant C (and C' = 3C for the pi_min interval). fallback is set when the
    certificate lower bounds were zero and no refinement was possible.
    """

    C: float
    C_prime: float
    fallback: bool
    gamma_plugin: float
    pimin_plugin: float
    w_prime: float | None
    b_prime: float | None
    U: tuple[float, float]
    V: tuple[float, float]
    tmix_interval: tuple[float, float]


@dataclass(frozen=True, eq=False)
class IntervalReport:
    """Per-state and derived confidence intervals at confidence 1 - delta."""

    n: int
    d: int
    delta: float
    pi_intervals: np.ndarray
    pimin_interval: tuple[float, float]
    gap_interval: tuple[float, float]
    pimin_lb: float
    gap_lb: float
    tmix_interval: tuple[float, float]
    combined: CombinedIntervals | None = None


@dataclass(frozen=True, eq=False)
class StoppingEntry:
    k: int
    n: int
    delta_k: float
    pimin_interval: tuple[float, float]
    gap_interval: tuple[float, float]
    pimin_ratio: float
    gap_ratio: float
    stopped_here: bool


@dataclass(frozen=True, eq=False)
class StoppingTrace:
    epsilon: float
    delta: float
    C: float
    stopped: bool
    final_n: int | None
    entries: tuple[StoppingEntry, ...]
    exhausted: bool


def transition_error_bound(p_hat_ij: float, n_i: int, d: int, t_hat: float, c: float = TAIL_GROWTH_C) -> float:
    """Entrywise bound on |P_hat_ij - P_ij| from the visit count n_i.

    Closed-form solution of the self-bounding quadratic inequality; an
    unvisited state (n_i = 0) yields the trivial bound 1.
    """
    if n_i < 0 or t_hat <= 0.0 or c <= 1.0 or not (0.0 < p_hat_ij < 1.0):
        raise DomainError("need n_i >= 0, p_hat_ij in (0, 1), t_hat > 0, c > 1")
    if n_i == 0:
        return 1.0
    half = c * t_hat / (2.0 * n_i)
    inner = (
        half
        + math.sqrt(2.0 * c * p_hat_ij * (1.0 - p_hat_ij) * t_hat / n_i)
        + ((4.0 / 3.0) * t_hat + abs(p_hat_ij - 1.0 / d)) / n_i
    )
    return (math.sqrt(half) + math.sqrt(inner)) ** 2


def _transition_error_bounds(P_hat: np.ndarray, N_first: np.ndarray, t_hat: float, c: float) -> np.ndarray:
    """Vectorized transition_error_bound over the whole matrix."""
    d = P_hat.shape[0]
    N = N_first.astype(np.float64)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        half = c * t_hat / (2.0 * N)
        inner = (
            half
            + np.sqrt(2.0 * c * P_hat * (1.0 - P_hat) * t_hat / N)
            + ((4.0 / 3.0) * t_hat + np.abs(P_hat - 1.0 / d)) / N
        )
        B = (np.sqrt(half) + np.sqrt(inner)) ** 2
    B[N_first == 0, :] = 1.0
    return B


def _clip01(lo: float, hi: float) -> tuple[float, float]:
    return (min(max(lo, 0.0), 1.0), min(max(hi, 0.0), 1.0))


def _tmix_interval(gap_lo: float, gap_hi: float, pimin_lo: float) -> tuple[float, float]:
    """Conservative mixing-time interval from interval corners.

    The lower end uses the largest plausible gap, the upper end the smallest
    plausible gap and pi_min; a zero lower bound gives an infinite upper end.
    """
    lower = (1.0 / gap_hi - 1.0) * LN2 if gap_hi > 0.0 else math.inf
    if gap_lo <= 0.0 or pimin_lo <= 0.0:
        upper = math.inf
    else:
        upper = (1.0 / gap_lo) * math.log(4.0 / pimin_lo)
    return (lower, upper)


def empirical_intervals(path: SamplePath, delta: float) -> tuple[EmpiricalCertificate, IntervalReport]:
    """Simultaneous confidence intervals for all pi_i and the spectral gap.

    Valid at confidence 1 - delta without knowledge of any chain parameter.
    All bounds are computed from the smoothed transition estimate, its group
    inverse, and entrywise martingale error bounds on the transition matrix.
    """
    if not (0.0 < delta < 1.0):
        raise DomainError("delta must lie in (0, 1)")
    stats = collect_statistics(path)
    n, d = stats.n, stats.d
    P_hat = smoothed_transitions(stats).P_hat
    pi_hat = _stationary_of_matrix(P_hat)
    gi = group_inverse(P_hat, pi_hat)

    root = np.sqrt(pi_hat)
    L_hat = root[:, None] * P_hat / root[None, :]
    eigs = sym_eigenvalues(0.5 * (L_hat + L_hat.T))
    if abs(eigs[0] - 1.0) > 1e-8:
        raise MixcertError("leading eigenvalue of the estimated operator deviates from 1")
    gamma_hat = 1.0 - max(float(eigs[1]), abs(float(eigs[-1])))

    t_hat = tail_threshold(n, d, delta, c=TAIL_GROWTH_C)
    B_hat = _transition_error_bounds(P_hat, stats.N_first, t_hat, TAIL_GROWTH_C)

    a_sharp = gi.a_sharp
    kappa_hat = 0.5 * float(np.max(np.diag(a_sharp) - a_sharp.min(axis=0)))
    b_hat = kappa_hat * float(B_hat.max())

    margins = pi_hat - b_hat
    with np.errstate(divide="ignore"):
        ratios = np.maximum(b_hat / pi_hat, np.where(margins > 0.0, b_hat / np.maximum(margins, 1e-300), math.inf))
    rho_hat = 0.5 * float(np.max(ratios))
    frob = float(np.sqrt(np.sum((pi_hat[:, None] / pi_hat[None, :]) * B_hat**2)))
    w_hat = 2.0 * rho_hat + rho_hat**2 + (1.0 + 2.0 * rho_hat + rho_hat**2) * frob

    cert = EmpiricalCertificate(
        n=n,
        d=d,
        delta=delta,
        t_hat=t_hat,
        B_hat=B_hat,
        kappa_hat=kappa_hat,
        b_hat=b_hat,
        rho_hat=rho_hat,
        w_hat=w_hat,
        pi_hat=pi_hat,
        gamma_hat=gamma_hat,
        eigenvalues_hat=eigs,
        group_inverse_residuals=gi.residuals,
    )

    pi_intervals = np.empty((d, 2))
    pi_intervals[:, 0] = np.clip(pi_hat - b_hat, 0.0, 1.0)
    pi_intervals[:, 1] = np.clip(pi_hat + b_hat, 0.0, 1.0)
    pimin_hat = float(pi_hat.min())
    pimin_interval = _clip01(pimin_hat - b_hat, pimin_hat + b_hat)
    gap_interval = _clip01(gamma_hat - w_hat, gamma_hat + w_hat)
    report = IntervalReport(
        n=n,
        d=d,
        delta=delta,
        pi_intervals=pi_intervals,
        pimin_interval=pimin_interval,
        gap_interval=gap_interval,
        pimin_lb=max(pimin_hat - b_hat, 0.0),
        gap_lb=max(gamma_hat - w_hat, 0.0),
        tmix_interval=_tmix_interval(gap_interval[0], gap_interval[1], pimin_interval[0]),
    )
    return cert, report


def _intersect(a: tuple[float, float], b: tuple[float, float]) -> tuple[float, float] | None:
    lo, hi = max(a[0], b[0]), min(a[1], b[1])
    return None if lo > hi else (lo, hi)


def combine_with_plugin(report: IntervalReport, plug, C: float = 1.0) -> IntervalReport:
    """Intersect certificate intervals with plug-in deviation intervals.

    When both certificate lower bounds are positive they are substituted into
    the closed-form deviation bounds, centered on the direct plug-in
    estimates, and intersected with the certificate intervals; the result is
    valid at confidence 1 - 2*delta conditional on the constant C. Otherwise
    the certificate intervals are returned unchanged with fallback set.
    """
    if C <= 0.0:
        raise DomainError("C must be positive")
    delta = report.delta
    pimin_lb, gap_lb = report.pimin_lb, report.gap_lb
    n, d = report.n, report.d

    def fallback() -> IntervalReport:
        combined = CombinedIntervals(
            C=C,
            C_prime=3.0 * C,
            fallback=True,
            gamma_plugin=plug.gamma_hat,
            pimin_plugin=plug.pimin_hat,
            w_prime=None,
            b_prime=None,
            U=report.pimin_interval,
            V=report.gap_interval,
            tmix_interval=report.tmix_interval,
        )
        return replace(report, combined=combined)

    if pimin_lb <= 0.0 or gap_lb <= 0.0:
        return fallback()

    log_d = math.log(d / delta)
    log_n = math.log(n / (pimin_lb * delta))
    log_dp = math.log(d / (pimin_lb * delta))
    ratio = log_d * log_n / (pimin_lb * gap_lb * n)
    w_prime = C * (math.sqrt(ratio) + ratio + math.log(1.0 / gap_lb) / (gap_lb * n))
    b_prime = 3.0 * C * (
        math.sqrt(plug.pimin_hat * log_dp / (gap_lb * n)) + log_dp / (gap_lb * n)
    )

    U = _intersect(_clip01(plug.pimin_hat - b_prime, plug.pimin_hat + b_prime), report.pimin_interval)
    V = _intersect(_clip01(plug.gamma_hat - w_prime, plug.gamma_hat + w_prime), report.gap_interval)
    if U is None or V is None:
        return fallback()
    combined = CombinedIntervals(
        C=C,
        C_prime=3.0 * C,
        fallback=False,
        gamma_plugin=plug.gamma_hat,
        pimin_plugin=plug.pimin_hat,
        w_prime=w_prime,
        b_prime=b_prime,
        U=U,
        V=V,
        tmix_interval=_tmix_interval(V[0], V[1], U[0]),
    )
    return replace(report, combined=combined)


def combined_intervals(path: SamplePath, delta: float, C: float = 1.0) -> IntervalReport:
    """Run the certificate pipeline and refine it with plug-in deviation intervals."""
    _, report = empirical_intervals(path, delta)
    plug = plugin_estimate(collect_statistics(path))
    return combine_with_plugin(report, plug, C)


class PathSource:
    """Prefix-readable source of observations (base protocol)."""

    d: int

    def prefix(self, n: int) -> SamplePath:
        raise NotImplementedError


class MaterializedSource(PathSource):
    """Prefixes of an already materialized path."""

    def __init__(self, path: SamplePath):
        self._path = path
        self.d = path.d

    def prefix(self, n: int) -> SamplePath:
        if n > self._path.n:
            raise SourceExhaustedError(f"source has {self._path.n} observations, {n} requested")
        if n == self._path.n:
            return self._path
        return SamplePath(d=self.d, states=self._path.states[:n].copy())


class SimulatedSource(PathSource):
    """Lazily extended simulation; prefixes agree with simulate_path for every length.

    The generator state is carried across extensions, so draws are consumed
    in exactly the order of a one-shot simulation of the final length.
    """

    def __init__(self, chain, init, seed: int, max_steps: int):
        from .chains import _draw_from, _resolve_init

        self._chain = chain
        self.d = chain.d
        self._max_steps = max_steps
        self._rng = np.random.default_rng(seed)
        state, dist = _resolve_init(chain, init)
        if dist is not None:
            state = _draw_from(dist, self._rng.random())
        self._cum = np.cumsum(chain.P, axis=1)
        self._states = np.array([state], dtype=np.int64)

    def prefix(self, n: int) -> SamplePath:
        from ._kernels import inverse_cdf_walk

        if n > self._max_steps:
            raise SourceExhaustedError(f"simulation budget is {self._max_steps} steps, {n} requested")
        have = self._states.shape[0]
        if n > have:
            u = self._rng.random(n - have)
            ext = inverse_cdf_walk(self._cum, u, int(self._states[-1]))
            self._states = np.concatenate([self._states, ext[1:]])
        return SamplePath(d=self.d, states=self._states[:n].copy())


def stopping_rule(source: PathSource, epsilon: float, delta: float, C: float = 1.0) -> StoppingTrace:
    """Evaluate combined intervals on doubling prefixes until both are relatively tight.

    At prefix length n = 2^k (k = 1, 2, ...) the intervals are computed at
    confidence delta/(k(k+1)), which telescopes to an overall budget of at
    most delta. Stopping requires, for the pi_min and gap intervals alike, a
    positive lower endpoint and width/lower-endpoint < epsilon. An exhausted
    source ends the trace with stopped=False.
    """
    if not (0.0 < epsilon):
        raise DomainError("epsilon must be positive")
    if not (0.0 < delta < 1.0):
        raise DomainError("delta must lie in (0, 1)")
    entries: list[StoppingEntry] = []
    k = 1
    while True:
        n = 2**k
        try:
            prefix = source.prefix(n)
        except SourceExhaustedError:
            return StoppingTrace(
                epsilon=epsilon, delta=delta, C=C, stopped=False, final_n=None,
                entries=tuple(entries), exhausted=True,
            )
        delta_k = delta / (k * (k + 1))
        report = combined_intervals(prefix, delta_k, C)
        U, V = report.combined.U, report.combined.V

        def rel_width(iv: tuple[float, float]) -> float:
            lo, hi = iv
            return (hi - lo) / lo if lo > 0.0 else math.inf

        pimin_ratio = rel_width(U)
        gap_ratio = rel_width(V)
        stop = pimin_ratio < epsilon and gap_ratio < epsilon
        entries.append(
            StoppingEntry(
                k=k, n=n, delta_k=delta_k, pimin_interval=U, gap_interval=V,
                pimin_ratio=pimin_ratio, gap_ratio=gap_ratio, stopped_here=stop,
            )
        )
        if stop:
            return StoppingTrace(
                epsilon=epsilon, delta=delta, C=C, stopped=True, final_n=n,
                entries=tuple(entries), exhausted=False,
            )
        k += 1
