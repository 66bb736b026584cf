"""Monte Carlo validation harness: coverage, width-decay and accuracy experiments.

Each trial derives its seed from the master seed with a SplitMix64 mix, so
results are reproducible, independent of the worker count, and recorded in
every report for replay. Reports expose to_json_dict() for deterministic
serialization; wall-clock timing is kept out of the JSON on purpose.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .chains import ChainSpec, SamplePath, exact_spectral_summary, simulate_path, validate_chain
from .errors import DivergedError, DomainError
from .estimators import plugin_estimate
from .intervals import empirical_intervals
from .pathstats import collect_statistics

_MASK64 = (1 << 64) - 1
SEED_SCHEME = "splitmix64-v1"


def trial_seed(master_seed: int, trial_index: int) -> int:
    """Per-trial 64-bit seed: SplitMix64 finalizer of master + (i+1)*golden."""
    z = (master_seed + (trial_index + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK64
    z ^= z >> 31
    return z


def random_reversible_chain(d: int, rng: np.random.Generator) -> ChainSpec:
    """Random dense ergodic reversible chain built from a symmetric weight matrix."""
    W = rng.random((d, d))
    W = 0.5 * (W + W.T)
    W[np.diag_indices(d)] += rng.random(d) + 0.5
    rows = W.sum(axis=1)
    return validate_chain(W / rows[:, None], pi_known=rows / rows.sum())


def _true_pi(chain: ChainSpec) -> np.ndarray:
    if chain.pi_known is not None:
        return np.asarray(chain.pi_known)
    from .chains import _stationary_of_matrix

    return _stationary_of_matrix(chain.P)


def tv_mixing_oracle(chain: ChainSpec, threshold: float = 0.25, cap: int = 10**6) -> int:
    """Exact mixing time by iterating all point-mass starts.

    Worst-case total-variation distance to the stationary law is attained at
    point-mass initial distributions, and the distance itself is half the L1
    norm, so the maximization over sets is exact. Small chains only (d <= 64).
    """
    if chain.d > 64:
        raise DomainError("exact mixing oracle is limited to d <= 64")
    pi = _true_pi(chain)
    D = np.eye(chain.d)
    for t in range(1, cap + 1):
        D = D @ chain.P
        worst = 0.5 * float(np.max(np.abs(D - pi[None, :]).sum(axis=1)))
        if worst <= threshold:
            return t
    raise DivergedError(f"no mixing below threshold within {cap} iterations")


# ---------------------------------------------------------------------------
# experiment workers (top level so they can cross process boundaries)


def _coverage_worker(args):
    chain, n, delta, seed, init, gamma_true, pi_true = args
    path = simulate_path(chain, n, init, seed)
    cert, report = empirical_intervals(path, delta)
    lo, hi = report.gap_interval
    covered_gap = bool(lo <= gamma_true <= hi)
    covered_pi = bool(
        np.all((report.pi_intervals[:, 0] <= pi_true) & (pi_true <= report.pi_intervals[:, 1]))
    )
    return {
        "seed": seed,
        "gamma_hat": cert.gamma_hat,
        "w_hat": cert.w_hat,
        "b_hat": cert.b_hat,
        "kappa_hat": cert.kappa_hat,
        "gap_lb": report.gap_lb,
        "pimin_lb": report.pimin_lb,
        "covered_gap": covered_gap,
        "covered_pi": covered_pi,
        "covered_joint": covered_gap and covered_pi,
    }


def _width_worker(args):
    chain, n_grid, delta, seed, init = args
    path = simulate_path(chain, max(n_grid), init, seed)
    w_by_n, b_by_n = [], []
    for n in n_grid:
        prefix = SamplePath(d=path.d, states=path.states[:n].copy())
        cert, _ = empirical_intervals(prefix, delta)
        w_by_n.append(cert.w_hat)
        b_by_n.append(cert.b_hat)
    return {"seed": seed, "w_hat": w_by_n, "b_hat": b_by_n}


def _accuracy_worker(args):
    chain, n_grid, seed, init, gamma_true, L_true = args
    path = simulate_path(chain, max(n_grid), init, seed)
    errors, weyl_ok = [], []
    for n in n_grid:
        prefix = SamplePath(d=path.d, states=path.states[:n].copy())
        stats = collect_statistics(prefix)
        est = plugin_estimate(stats)
        errors.append(abs(est.gamma_hat - gamma_true))
        if est.degenerate:
            weyl_ok.append(None)
            continue
        root = np.sqrt(stats.pi_hat_emp)
        L_hat = stats.M_hat / np.outer(root, root)
        sym_err = float(np.linalg.norm(0.5 * (L_hat + L_hat.T) - L_true, 2))
        raw_err = float(np.linalg.norm(L_hat - L_true, 2))
        weyl_ok.append(
            bool(abs(est.gamma_hat - gamma_true) <= sym_err + 1e-10 and sym_err <= raw_err + 1e-10)
        )
    return {"seed": seed, "abs_err": errors, "weyl_ok": weyl_ok}


def _map_trials(worker, args_list, jobs: int):
    if jobs <= 1:
        return [worker(a) for a in args_list]
    chunk = max(1, len(args_list) // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(worker, args_list, chunksize=chunk))


# ---------------------------------------------------------------------------
# reports


def _binomial_se(p: float, trials: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / trials)


def _chain_doc(chain: ChainSpec) -> dict:
    doc = {"d": chain.d, "P": chain.P}
    if chain.pi_known is not None:
        doc["pi"] = chain.pi_known
    return doc


@dataclass(frozen=True, eq=False)
class CoverageReport:
    chain: ChainSpec
    n: int
    trials: int
    delta: float
    master_seed: int
    init: str
    gamma_true: float
    pi_true: np.ndarray
    per_trial: tuple[dict, ...]
    wall_clock_s: float

    def to_json_dict(self) -> dict:
        T = self.trials
        cg = sum(t["covered_gap"] for t in self.per_trial) / T
        cp = sum(t["covered_pi"] for t in self.per_trial) / T
        cj = sum(t["covered_joint"] for t in self.per_trial) / T
        w = [t["w_hat"] for t in self.per_trial]
        b = [t["b_hat"] for t in self.per_trial]
        return {
            "schema": 1,
            "kind": "coverage_report",
            "chain": _chain_doc(self.chain),
            "n": self.n,
            "trials": T,
            "delta": self.delta,
            "master_seed": self.master_seed,
            "seed_scheme": SEED_SCHEME,
            "init": self.init,
            "truth": {"gamma": self.gamma_true, "pi": self.pi_true},
            "coverage": {
                "gap": {"rate": cg, "se": _binomial_se(cg, T)},
                "pi_all": {"rate": cp, "se": _binomial_se(cp, T)},
                "joint": {"rate": cj, "se": _binomial_se(cj, T)},
            },
            "widths": {
                "w_hat": {"mean": float(np.mean(w)), "median": float(np.median(w))},
                "b_hat": {"mean": float(np.mean(b)), "median": float(np.median(b))},
            },
            "per_trial": list(self.per_trial),
        }


@dataclass(frozen=True, eq=False)
class WidthReport:
    chain: ChainSpec
    n_grid: tuple[int, ...]
    trials: int
    delta: float
    master_seed: int
    init: str
    per_trial: tuple[dict, ...]
    wall_clock_s: float

    def to_json_dict(self) -> dict:
        W = np.array([t["w_hat"] for t in self.per_trial], dtype=np.float64)
        B = np.array([t["b_hat"] for t in self.per_trial], dtype=np.float64)
        mean_w = [float(c.mean()) for c in W.T]
        ratios = [mean_w[j + 1] / mean_w[j] for j in range(len(mean_w) - 1)]
        return {
            "schema": 1,
            "kind": "width_report",
            "chain": _chain_doc(self.chain),
            "n_grid": list(self.n_grid),
            "trials": self.trials,
            "delta": self.delta,
            "master_seed": self.master_seed,
            "seed_scheme": SEED_SCHEME,
            "init": self.init,
            "mean_w": mean_w,
            "median_w": [float(np.median(c)) for c in W.T],
            "mean_b": [float(c.mean()) for c in B.T],
            "infinite_w": [int(np.sum(np.isinf(c))) for c in W.T],
            "mean_w_ratios": ratios,
            "per_trial": list(self.per_trial),
        }


@dataclass(frozen=True, eq=False)
class AccuracyReport:
    chain: ChainSpec
    n_grid: tuple[int, ...]
    trials: int
    master_seed: int
    init: str
    gamma_true: float
    per_trial: tuple[dict, ...]
    wall_clock_s: float

    def to_json_dict(self) -> dict:
        E = np.array([t["abs_err"] for t in self.per_trial], dtype=np.float64)
        weyl = [t["weyl_ok"] for t in self.per_trial]
        flat = [x for row in weyl for x in row if x is not None]
        return {
            "schema": 1,
            "kind": "accuracy_report",
            "chain": _chain_doc(self.chain),
            "n_grid": list(self.n_grid),
            "trials": self.trials,
            "master_seed": self.master_seed,
            "seed_scheme": SEED_SCHEME,
            "init": self.init,
            "gamma_true": self.gamma_true,
            "median_abs_err": [float(np.median(c)) for c in E.T],
            "mean_abs_err": [float(c.mean()) for c in E.T],
            "weyl_checked": len(flat),
            "weyl_violations": int(sum(1 for x in flat if not x)),
            "per_trial": list(self.per_trial),
        }


# ---------------------------------------------------------------------------
# experiment drivers


def run_coverage(chain, n, trials, delta, master_seed, jobs=1, init="stationary") -> CoverageReport:
    """Empirical joint coverage of the gap and per-state intervals over seeded trials."""
    t0 = time.perf_counter()
    gamma_true = exact_spectral_summary(chain).gap
    pi_true = _true_pi(chain)
    args = [
        (chain, n, delta, trial_seed(master_seed, i), init, gamma_true, pi_true)
        for i in range(trials)
    ]
    results = _map_trials(_coverage_worker, args, jobs)
    return CoverageReport(
        chain=chain, n=n, trials=trials, delta=delta, master_seed=master_seed, init=init,
        gamma_true=gamma_true, pi_true=pi_true, per_trial=tuple(results),
        wall_clock_s=time.perf_counter() - t0,
    )


def run_width(chain, n_grid, trials, delta, master_seed, jobs=1, init="stationary") -> WidthReport:
    """Interval widths across a growing sample-size grid with paired per-trial seeds."""
    n_grid = tuple(sorted(int(n) for n in n_grid))
    if len(n_grid) < 2:
        raise DomainError("width experiment needs at least two sample sizes")
    t0 = time.perf_counter()
    args = [(chain, n_grid, delta, trial_seed(master_seed, i), init) for i in range(trials)]
    results = _map_trials(_width_worker, args, jobs)
    return WidthReport(
        chain=chain, n_grid=n_grid, trials=trials, delta=delta, master_seed=master_seed,
        init=init, per_trial=tuple(results), wall_clock_s=time.perf_counter() - t0,
    )


def run_accuracy(chain, n_grid, trials, master_seed, jobs=1, init="stationary") -> AccuracyReport:
    """Plug-in gap accuracy across a sample-size grid, with the spectral-norm
    domination check (estimate error within the symmetrized operator error)
    evaluated on every non-degenerate trial."""
    n_grid = tuple(sorted(int(n) for n in n_grid))
    t0 = time.perf_counter()
    summary = exact_spectral_summary(chain)
    pi = _true_pi(chain)
    root = np.sqrt(pi)
    L_true = (pi[:, None] * chain.P) / np.outer(root, root)
    args = [
        (chain, n_grid, trial_seed(master_seed, i), init, summary.gap, L_true)
        for i in range(trials)
    ]
    results = _map_trials(_accuracy_worker, args, jobs)
    return AccuracyReport(
        chain=chain, n_grid=n_grid, trials=trials, master_seed=master_seed, init=init,
        gamma_true=summary.gap, per_trial=tuple(results), wall_clock_s=time.perf_counter() - t0,
    )
