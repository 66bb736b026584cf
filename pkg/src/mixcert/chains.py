"""Finite Markov chains: validation, exact spectral quantities, sampling, built-in families.

All state indices are 0-based. A chain is represented by its row-stochastic
transition matrix P; reversible ergodic chains additionally admit the
symmetric operator L = Diag(pi)^(1/2) P Diag(pi)^(-1/2), whose spectrum
defines the absolute spectral gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

import numpy as np

from .errors import (
    BadInitError,
    BadParamsError,
    NonStochasticError,
    NotErgodicError,
    NotReversibleError,
    PathTooShortError,
    TooSmallError,
)

ROW_SUM_TOL = 1e-12
DETAILED_BALANCE_TOL = 1e-10
ERGODIC_EIG_TOL = 1e-12
L_SYMMETRY_TOL = 1e-8

LN2 = math.log(2.0)

FAMILY_NAMES = (
    "two-state-A",
    "two-state-B",
    "perturbed-uniform-0",
    "perturbed-uniform-i",
    "lazy-uniform",
)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ChainSpec:
    """A validated row-stochastic matrix, optionally with a known stationary law."""

    d: int
    P: np.ndarray
    pi_known: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class StationaryDistribution:
    """Stationary probability vector and its minimum entry."""

    pi: np.ndarray
    pi_min: float


@dataclass(frozen=True, eq=False)
class SpectralSummary:
    """Descending spectrum of the symmetrized chain operator and derived quantities.

    lambda_star is max{lambda_2, |lambda_d|}, gap = 1 - lambda_star,
    t_relax = 1/gap, and the mixing-time sandwich is
    (t_relax - 1) ln 2 <= t_mix <= t_relax ln(4/pi_min).
    """

    eigenvalues: np.ndarray
    lambda_star: float
    gap: float
    t_relax: float
    tmix_lower: float
    tmix_upper: float


@dataclass(frozen=True, eq=False)
class SamplePath:
    """An observed state sequence over a d-state space (0-based states)."""

    d: int
    states: np.ndarray

    def __post_init__(self):
        states = np.ascontiguousarray(self.states, dtype=np.int64)
        if states.ndim != 1 or states.shape[0] < 2:
            raise PathTooShortError("a sample path needs at least two observations")
        if self.d < 2:
            raise TooSmallError("state count must be at least 2")
        if states.min() < 0 or states.max() >= self.d:
            raise BadInitError("path contains states outside [0, d)")
        object.__setattr__(self, "states", states)

    @property
    def n(self) -> int:
        return int(self.states.shape[0])


class ErgodicityFlags(NamedTuple):
    ergodic: bool
    reversible: bool


def validate_chain(raw, pi_known=None) -> ChainSpec:
    """Validate a square row-stochastic matrix and wrap it as a ChainSpec.

    Raises TooSmallError for d < 2 and NonStochasticError when an entry is
    negative or a row sum deviates from 1 by more than 1e-12. Ergodicity is
    deliberately not checked here (see check_ergodic_reversible).
    """
    P = np.array(raw, dtype=np.float64)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise NonStochasticError("transition matrix must be square")
    d = P.shape[0]
    if d < 2:
        raise TooSmallError("transition matrix must be at least 2x2")
    if np.min(P) < 0.0 or np.max(P) > 1.0 + ROW_SUM_TOL:
        raise NonStochasticError("transition probabilities must lie in [0, 1]")
    row_err = np.max(np.abs(P.sum(axis=1) - 1.0))
    if row_err > ROW_SUM_TOL:
        raise NonStochasticError(f"row sums deviate from 1 by {row_err:.3e}")
    pi = None
    if pi_known is not None:
        pi = np.array(pi_known, dtype=np.float64)
        if pi.shape != (d,):
            raise BadParamsError("pi_known has wrong length")
        if np.min(pi) <= 0.0 or abs(pi.sum() - 1.0) > ROW_SUM_TOL:
            raise BadParamsError("pi_known must be strictly positive and sum to 1")
        pi = _readonly(pi)
    return ChainSpec(d=d, P=_readonly(P), pi_known=pi)


def _stationary_of_matrix(P: np.ndarray) -> np.ndarray:
    """Solve pi P = pi, sum(pi) = 1 as a d x d linear system.

    One equation of pi (I - P) = 0 is replaced by the normalization row; for
    an irreducible chain the resulting system is nonsingular.
    """
    from .numerics import solve_linear

    d = P.shape[0]
    A = (np.eye(d) - P).T
    A[-1, :] = 1.0
    b = np.zeros(d)
    b[-1] = 1.0
    pi = solve_linear(A, b)
    if np.min(pi) <= 0.0:
        raise NotErgodicError("stationary solve produced a non-positive entry")
    resid = np.max(np.abs(pi @ P - pi))
    if resid > DETAILED_BALANCE_TOL:
        raise NotErgodicError(f"stationary residual {resid:.3e} too large")
    return pi / pi.sum()


def stationary_distribution(chain: ChainSpec) -> StationaryDistribution:
    """Stationary distribution of an irreducible chain via a direct linear solve."""
    try:
        pi = _stationary_of_matrix(chain.P)
    except Exception as exc:  # singular solve -> not ergodic
        raise NotErgodicError(f"no unique stationary distribution: {exc}") from exc
    return StationaryDistribution(pi=_readonly(pi), pi_min=float(pi.min()))


def check_ergodic_reversible(chain: ChainSpec) -> ErgodicityFlags:
    """Report (ergodic, reversible) flags for a validated chain.

    Ergodic: the stationary solve succeeds and every eigenvalue other than the
    unit one has modulus < 1 - 1e-12. Reversible: the detailed-balance
    residual max|pi_i P_ij - pi_j P_ji| is at most 1e-10.
    """
    try:
        pi = _stationary_of_matrix(chain.P)
    except Exception:
        return ErgodicityFlags(ergodic=False, reversible=False)
    F = pi[:, None] * chain.P
    reversible = bool(np.max(np.abs(F - F.T)) <= DETAILED_BALANCE_TOL)
    mods = np.sort(np.abs(np.linalg.eigvals(chain.P)))[::-1]
    ergodic = bool(abs(mods[0] - 1.0) <= 1e-8 and mods[1] < 1.0 - ERGODIC_EIG_TOL)
    return ErgodicityFlags(ergodic=ergodic, reversible=reversible)


def mixing_time_bounds(gap: float, pi_min: float) -> tuple[float, float]:
    """Two-sided mixing-time bounds from the relaxation time 1/gap.

    Returns ((1/gap - 1) ln 2, (1/gap) ln(4/pi_min)).
    """
    from .errors import DomainError

    if not (0.0 < gap <= 1.0):
        raise DomainError("gap must lie in (0, 1]")
    if not (0.0 < pi_min <= 1.0):
        raise DomainError("pi_min must lie in (0, 1]")
    t_relax = 1.0 / gap
    return ((t_relax - 1.0) * LN2, t_relax * math.log(4.0 / pi_min))


def exact_spectral_summary(chain: ChainSpec) -> SpectralSummary:
    """Exact spectrum-derived quantities of an ergodic reversible chain.

    Builds L = Diag(pi)^(-1/2) M Diag(pi)^(-1/2) with M = Diag(pi) P,
    symmetrizes away rounding asymmetry, and reads the descending spectrum.
    """
    from .numerics import sym_eigenvalues

    flags = check_ergodic_reversible(chain)
    if not flags.ergodic:
        raise NotErgodicError("chain is not ergodic")
    if not flags.reversible:
        raise NotReversibleError("chain violates detailed balance")
    pi = _stationary_of_matrix(chain.P)
    M = pi[:, None] * chain.P
    root = np.sqrt(pi)
    L = M / np.outer(root, root)
    if np.max(np.abs(L - L.T)) > L_SYMMETRY_TOL:
        raise NotReversibleError("symmetrized operator asymmetric beyond 1e-8")
    eigs = sym_eigenvalues(0.5 * (L + L.T))
    if abs(eigs[0] - 1.0) > 1e-8:
        raise NotErgodicError("leading eigenvalue deviates from 1")
    lambda_star = float(max(eigs[1], abs(eigs[-1])))
    gap = 1.0 - lambda_star
    lo, hi = mixing_time_bounds(gap, float(pi.min()))
    return SpectralSummary(
        eigenvalues=_readonly(eigs),
        lambda_star=lambda_star,
        gap=gap,
        t_relax=1.0 / gap,
        tmix_lower=lo,
        tmix_upper=hi,
    )


InitSpec = Union[int, str, Sequence[float], np.ndarray]


def _resolve_init(chain: ChainSpec, init: InitSpec) -> tuple[int | None, np.ndarray | None]:
    """Normalize an init spec to (fixed state, None) or (None, distribution)."""
    if isinstance(init, (int, np.integer)):
        i = int(init)
        if not (0 <= i < chain.d):
            raise BadInitError(f"initial state {i} outside [0, {chain.d})")
        return i, None
    if isinstance(init, str):
        if init == "stationary":
            pi = chain.pi_known
            if pi is None:
                pi = _stationary_of_matrix(chain.P)
            return None, np.asarray(pi, dtype=np.float64)
        if init == "uniform":
            return None, np.full(chain.d, 1.0 / chain.d)
        if init.startswith("state:"):
            return _resolve_init(chain, int(init.split(":", 1)[1]))
        raise BadInitError(f"unknown init spec {init!r}")
    q = np.asarray(init, dtype=np.float64)
    if q.shape != (chain.d,) or np.min(q) < 0.0 or abs(q.sum() - 1.0) > 1e-9:
        raise BadInitError("initial distribution must be a probability vector over [0, d)")
    return None, q


def _draw_from(dist: np.ndarray, u: float) -> int:
    """Inverse-CDF draw: smallest index j with u < cumsum(dist)[j]."""
    cum = np.cumsum(dist)
    j = int(np.searchsorted(cum, u, side="right"))
    return min(j, dist.shape[0] - 1)


def simulate_path(chain: ChainSpec, n: int, init: InitSpec, seed: int) -> SamplePath:
    """Simulate n steps of the chain, deterministically in (chain, n, init, seed).

    The generator is NumPy PCG64 (np.random.default_rng). One uniform is
    consumed for the initial state when init is a distribution, then exactly
    one uniform per transition, mapped through the row inverse-CDF in
    increasing state order.
    """
    from ._kernels import inverse_cdf_walk

    if n < 2:
        raise PathTooShortError("simulation needs n >= 2")
    state, dist = _resolve_init(chain, init)
    rng = np.random.default_rng(seed)
    if dist is not None:
        state = _draw_from(dist, rng.random())
    cum = np.cumsum(chain.P, axis=1)
    u = rng.random(n - 1)
    states = inverse_cdf_walk(cum, u, state)
    return SamplePath(d=chain.d, states=states)


def _two_state(pibar: float, second_row: tuple[float, float], pi: tuple[float, float]) -> ChainSpec:
    P = np.array([[1.0 - pibar, pibar], list(second_row)])
    return validate_chain(P, pi_known=np.array(pi))


def chain_family(name: str, **params) -> ChainSpec:
    """Construct one of the built-in chain families.

    two-state-A(pibar):  rows both (1-pibar, pibar); gap exactly 1.
    two-state-B(pibar):  rows (1-pibar, pibar) and (1/2, 1/2); gap 1/2+pibar.
    perturbed-uniform-0(d, gammabar): self-loop 1-eps, off-diagonals
        eps/(d-1) with eps = ((d-1)/(d/2)) * gammabar; gap 2*gammabar.
    perturbed-uniform-i(d, gammabar, index): same but state `index` uses
        eps' = ((d/2-1)/(d-1)) * eps; gap gammabar.
    lazy-uniform(d, beta): self-loop 1-beta, off-diagonals beta/(d-1);
        uniform stationary law, gap 1 - |1 - beta*d/(d-1)|.
    """
    def need(key):
        if key not in params:
            raise BadParamsError(f"family {name!r} requires parameter {key!r}")
        return params[key]

    if name in ("two-state-A", "two-state-B"):
        pibar = float(need("pibar"))
        if not (0.0 < pibar < 0.25):
            raise BadParamsError("pibar must lie in (0, 1/4)")
        if name == "two-state-A":
            return _two_state(pibar, (1.0 - pibar, pibar), (1.0 - pibar, pibar))
        denom = 1.0 + 2.0 * pibar
        return _two_state(pibar, (0.5, 0.5), (1.0 / denom, 2.0 * pibar / denom))

    if name in ("perturbed-uniform-0", "perturbed-uniform-i"):
        d = int(need("d"))
        gammabar = float(need("gammabar"))
        if d < 3:
            raise BadParamsError("perturbed-uniform families need d >= 3")
        if not (0.0 < gammabar < 0.5):
            raise BadParamsError("gammabar must lie in (0, 1/2)")
        eps = (d - 1.0) / (d / 2.0) * gammabar
        eps_vec = np.full(d, eps)
        if name == "perturbed-uniform-i":
            i = int(need("index"))
            if not (0 <= i < d):
                raise BadParamsError("index outside [0, d)")
            eps_vec[i] = (d / 2.0 - 1.0) / (d - 1.0) * eps
        P = np.empty((d, d))
        for i in range(d):
            P[i, :] = eps_vec[i] / (d - 1.0)
            P[i, i] = 1.0 - eps_vec[i]
        w = 1.0 / eps_vec
        return validate_chain(P, pi_known=w / w.sum())

    if name == "lazy-uniform":
        d = int(need("d"))
        beta = float(need("beta"))
        if d < 2:
            raise BadParamsError("lazy-uniform needs d >= 2")
        if not (0.0 < beta <= 1.0) or (d == 2 and beta >= 1.0):
            raise BadParamsError("beta must lie in (0, 1], strictly below 1 for d = 2")
        P = np.full((d, d), beta / (d - 1.0))
        np.fill_diagonal(P, 1.0 - beta)
        return validate_chain(P, pi_known=np.full(d, 1.0 / d))

    raise BadParamsError(f"unknown family {name!r}; choose from {FAMILY_NAMES}")
