"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; every check pins its tolerance and its runtime budget.
"""

import json
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

import mixcert as mc
from mixcert.harness import (
    random_reversible_chain,
    run_accuracy,
    run_coverage,
    run_width,
    trial_seed,
    tv_mixing_oracle,
)
from mixcert.numerics import _tail_lhs
from mixcert.pathstats import collect_statistics, smoothed_transitions

LN2 = math.log(2.0)


def report(name, ok, detail, elapsed, budget):
    line = f"[acceptance] {name}: {'PASS' if ok else 'FAIL'} ({detail}; {elapsed:.1f}s of {budget}s)"
    print(line)
    assert ok, line
    assert elapsed < budget, f"{name} exceeded runtime budget: {elapsed:.1f}s >= {budget}s"


def test_01_exact_spectrum_oracle():
    t0 = time.perf_counter()
    checks = 0
    for pibar in (0.05, 0.1, 0.15, 0.2):
        fast = mc.chain_family("two-state-A", pibar=pibar)
        assert mc.exact_spectral_summary(fast).gap == pytest.approx(1.0, abs=1e-12)
        slow = mc.chain_family("two-state-B", pibar=pibar)
        assert mc.exact_spectral_summary(slow).gap == pytest.approx(0.5 + pibar, abs=1e-12)
        checks += 2
    for d in (3, 4, 8, 16):
        for gammabar in (0.05, 0.25, 0.45):
            eps = (d - 1) / (d / 2) * gammabar
            base = mc.exact_spectral_summary(mc.chain_family("perturbed-uniform-0", d=d, gammabar=gammabar))
            assert base.eigenvalues[1] == pytest.approx(1 - d * eps / (d - 1), abs=1e-12)
            assert base.eigenvalues[-1] == pytest.approx(1 - d * eps / (d - 1), abs=1e-12)
            tilt = mc.exact_spectral_summary(
                mc.chain_family("perturbed-uniform-i", d=d, gammabar=gammabar, index=d // 2)
            )
            assert tilt.eigenvalues[1] == pytest.approx(1 - (d / 2) * eps / (d - 1), abs=1e-12)
            assert tilt.eigenvalues[-1] == pytest.approx(1 - d * eps / (d - 1), abs=1e-12)
            checks += 4
    report("criterion 1 (exact spectra)", True, f"{checks} closed-form checks at 1e-12",
           time.perf_counter() - t0, 1.0)


def test_02_group_inverse_axioms():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20250809)
    worst = 0.0
    for _ in range(1000):
        d = int(rng.integers(2, 21))
        n = int(rng.integers(2, 400))
        states = rng.integers(0, d, size=max(n, 2))
        stats = collect_statistics(mc.SamplePath(d=d, states=states))
        P_hat = smoothed_transitions(stats).P_hat
        pi_hat = mc.stationary_distribution(mc.validate_chain(P_hat)).pi
        gi = mc.group_inverse(P_hat, pi_hat)
        worst = max(worst, max(gi.residuals))
    p, q = 0.1, 0.5
    P = np.array([[1 - p, p], [q, 1 - q]])
    gi = mc.group_inverse(P, np.array([q, p]) / (p + q))
    closed = np.array([[p, -p], [-q, q]]) / (p + q) ** 2
    closed_ok = np.max(np.abs(gi.a_sharp - closed)) <= 1e-10
    report("criterion 2 (group-inverse axioms)", worst <= 1e-8 and closed_ok,
           f"1000 fuzzed inverses, worst residual {worst:.2e}", time.perf_counter() - t0, 30.0)


def test_03_weyl_containment():
    t0 = time.perf_counter()
    rng = np.random.default_rng(64)
    checked = 0
    for i in range(500):
        chain = random_reversible_chain(int(rng.integers(2, 11)), rng)
        gap = mc.exact_spectral_summary(chain).gap
        pi = chain.pi_known
        L = (pi[:, None] * chain.P) / np.sqrt(np.outer(pi, pi))
        path = mc.simulate_path(chain, 10**4, "stationary", trial_seed(808, i))
        stats = collect_statistics(path)
        est = mc.plugin_estimate(stats)
        if est.degenerate:
            continue
        root = np.sqrt(stats.pi_hat_emp)
        L_hat = stats.M_hat / np.outer(root, root)
        sym_err = np.linalg.norm(0.5 * (L_hat + L_hat.T) - L, 2)
        raw_err = np.linalg.norm(L_hat - L, 2)
        assert abs(est.gamma_hat - gap) <= sym_err + 1e-10
        assert sym_err <= raw_err + 1e-10
        checked += 1
    report("criterion 3 (Weyl containment)", checked >= 490,
           f"{checked}/500 non-degenerate trials all contained", time.perf_counter() - t0, 120.0)


def test_04_coverage():
    t0 = time.perf_counter()
    chain = mc.chain_family("two-state-B", pibar=0.2)
    rep = run_coverage(chain, 10**5, 200, 0.1, master_seed=1234)
    doc = rep.to_json_dict()
    joint = doc["coverage"]["joint"]["rate"]
    # sensitivity diagnostic: kappa_hat within its spectral bound on covered trials
    kappa_ok = True
    for t in rep.per_trial:
        if t["covered_joint"] and t["gap_lb"] > 0 and t["pimin_lb"] > 0:
            bound = (1.0 / t["gap_lb"]) * min(chain.d, 8 + math.log(4 / t["pimin_lb"]))
            kappa_ok = kappa_ok and t["kappa_hat"] <= bound + 1e-9
    report("criterion 4 (coverage)", joint >= 0.836 and kappa_ok,
           f"joint coverage {joint:.3f} over 200 trials (need >= 0.836)",
           time.perf_counter() - t0, 600.0)


def test_05_width_decay():
    t0 = time.perf_counter()
    chain = mc.chain_family("two-state-B", pibar=0.2)
    doc = run_width(chain, (10**5, 4 * 10**5), 40, 0.1, master_seed=555).to_json_dict()
    ratio = doc["mean_w_ratios"][0]
    report("criterion 5 (width decay)", ratio <= 0.7 and doc["infinite_w"] == [0, 0],
           f"mean w(4e5)/mean w(1e5) = {ratio:.3f} (need <= 0.7)", time.perf_counter() - t0, 900.0)


def test_06_plugin_consistency():
    t0 = time.perf_counter()
    chain = mc.chain_family("two-state-B", pibar=0.1)  # gap exactly 0.6
    doc = run_accuracy(chain, (10**4, 10**5, 10**6), 20, master_seed=777).to_json_dict()
    med = doc["median_abs_err"]
    ok = med[2] <= 0.05 and med[0] >= med[1] >= med[2] and doc["weyl_violations"] == 0
    report("criterion 6 (plug-in consistency)", ok,
           f"medians {['%.4f' % m for m in med]} non-increasing, final <= 0.05",
           time.perf_counter() - t0, 600.0)


def test_07_bootstrap_behavior():
    t0 = time.perf_counter()
    slow = mc.chain_family("lazy-uniform", d=2, beta=0.01)  # gap 0.02
    big_A = rel_ok = 0
    for i in range(50):
        path = mc.simulate_path(slow, 10**6, "stationary", trial_seed(31337, i))
        est = mc.bootstrap_estimate(path)
        big_A += est.A >= 8
        rel_ok += abs(est.gamma_tilde / 0.02 - 1.0) <= 0.5
    fast = mc.chain_family("two-state-A", pibar=0.2)  # gap 1 >= 1/2
    ones = 0
    for i in range(50):
        ones += mc.bootstrap_estimate(mc.simulate_path(fast, 2**14, "stationary", trial_seed(999, i))).A == 1
    ok = big_A >= 40 and rel_ok >= 40 and ones >= 48
    report("criterion 7 (bootstrap behavior)", ok,
           f"slow chain: A>=8 in {big_A}/50, rel err <= 0.5 in {rel_ok}/50; fast chain: A=1 in {ones}/50",
           time.perf_counter() - t0, 900.0)


def test_08_tmix_sandwich_on_oracles():
    t0 = time.perf_counter()
    instances = []
    for pibar in (0.05, 0.1, 0.2):
        instances.append(mc.chain_family("two-state-A", pibar=pibar))
        instances.append(mc.chain_family("two-state-B", pibar=pibar))
    for d in (3, 4, 8, 16):
        for gammabar in (0.05, 0.25, 0.45):
            instances.append(mc.chain_family("perturbed-uniform-0", d=d, gammabar=gammabar))
            instances.append(mc.chain_family("perturbed-uniform-i", d=d, gammabar=gammabar, index=0))
    for d, beta in ((2, 0.3), (4, 0.75), (16, 0.5), (16, 1.0)):
        instances.append(mc.chain_family("lazy-uniform", d=d, beta=beta))
    for chain in instances:
        s = mc.exact_spectral_summary(chain)
        t_mix = tv_mixing_oracle(chain)
        assert s.tmix_lower <= t_mix <= s.tmix_upper + 1e-9, (chain.d, s.gap, t_mix)
    report("criterion 8 (mixing-time sandwich)", True,
           f"{len(instances)} family instances, d <= 16", time.perf_counter() - t0, 60.0)


def test_09_tail_threshold_vs_grid():
    t0 = time.perf_counter()
    worst = 0.0
    for n in (100, 10**4, 10**6):
        for d in (2, 10, 50):
            for delta in (0.01, 0.05, 0.2):
                t_bis = mc.tail_threshold(n, d, delta)
                t = 1e-3
                while _tail_lhs(t, n, d, 1.1) > delta:
                    t += 1e-3
                t_grid = t - 1e-3 + 1e-6
                while _tail_lhs(t_grid, n, d, 1.1) > delta:
                    t_grid += 1e-6
                worst = max(worst, abs(t_bis - t_grid))
    report("criterion 9 (threshold bisection vs grid)", worst <= 1e-5,
           f"27 configurations, worst gap {worst:.2e}", time.perf_counter() - t0, 5.0)


def test_10_stopping_rule_soundness():
    t0 = time.perf_counter()
    chain = mc.chain_family("two-state-A", pibar=0.2)  # gap 1, pi_min 0.2
    stopped = covered = 0
    for i in range(20):
        src = mc.SimulatedSource(chain, "stationary", trial_seed(31415, i), 2**24)
        trace = mc.stopping_rule(src, 0.5, 0.2)
        if not trace.stopped:
            continue
        stopped += 1
        e = trace.entries[-1]
        gap_in = e.gap_interval[0] <= 1.0 <= e.gap_interval[1]
        pimin_in = e.pimin_interval[0] <= 0.2 <= e.pimin_interval[1]
        covered += gap_in and pimin_in
    report("criterion 10 (stopping rule)", stopped == 20 and covered >= 16,
           f"all 20 stopped within 2^24, truth covered at stop in {covered}/20 (need >= 16)",
           time.perf_counter() - t0, 1200.0)


def test_11_cli_determinism(tmp_path):
    t0 = time.perf_counter()

    def run(*args, jobs=None):
        env = dict(os.environ)
        env.pop("MIXCERT_JOBS", None)
        cmd = [sys.executable, "-m", "mixcert.cli", *args]
        if jobs is not None:
            cmd += ["--jobs", str(jobs)]
        proc = subprocess.run(cmd, capture_output=True, env=env)
        assert proc.returncode == 0, proc.stderr.decode()
        return proc.stdout

    chain = tmp_path / "chain.json"
    path = tmp_path / "path.txt"
    pairs_equal = []

    def twice(*args, jobs=None):
        pairs_equal.append(run(*args, jobs=jobs) == run(*args, jobs=jobs))

    twice("chains", "make", "--family", "two-state-B", "--pibar", "0.2", "--out", str(chain))
    ca = (tmp_path / "chain.json").read_bytes()
    run("chains", "make", "--family", "two-state-B", "--pibar", "0.2", "--out", str(chain))
    pairs_equal.append(ca == chain.read_bytes())

    twice("simulate", "--chain", str(chain), "--steps", "4000", "--seed", "11", "--out", str(path))
    pa = path.read_bytes()
    run("simulate", "--chain", str(chain), "--steps", "4000", "--seed", "11", "--out", str(path))
    pairs_equal.append(pa == path.read_bytes())

    twice("estimate", "--path", str(path))
    twice("estimate", "--path", str(path), "--method", "bootstrap")
    twice("ci", "--path", str(path), "--delta", "0.1")
    twice("ci", "--path", str(path), "--delta", "0.1", "--combined")
    twice("stoprule", "--chain", str(chain), "--epsilon", "0.9", "--delta", "0.2",
          "--seed", "8", "--max-steps", "65536")

    val = ("validate", "coverage", "--chain", str(chain), "--trials", "8", "--steps", "2000",
           "--delta", "0.1", "--seed", "4")
    twice(*val, jobs=1)
    twice(*val, jobs=4)
    pairs_equal.append(run(*val, jobs=1) == run(*val, jobs=4))

    ok = all(pairs_equal)
    report("criterion 11 (CLI determinism)", ok,
           f"{len(pairs_equal)} byte-identity checks incl. --jobs 1 vs 4",
           time.perf_counter() - t0, 120.0)
