"""End-to-end CLI checks: fixtures, library equality, determinism, exit codes."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from mixcert import (
    SimulatedSource,
    bootstrap_estimate,
    collect_statistics,
    plugin_estimate,
    simulate_path,
    stopping_rule,
)
from mixcert.io import load_chain, load_path


def run_cli(*args, env_extra=None, check=True):
    env = dict(os.environ)
    env.pop("MIXCERT_JOBS", None)
    if env_extra:
        env.update(env_extra)
    proc = subprocess.run(
        [sys.executable, "-m", "mixcert.cli", *args],
        capture_output=True,
        env=env,
    )
    if check and proc.returncode != 0:
        raise AssertionError(f"cli failed ({proc.returncode}): {proc.stderr.decode()}")
    return proc


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    chain = root / "chain.json"
    path = root / "path.txt"
    run_cli("chains", "make", "--family", "two-state-B", "--pibar", "0.1", "--out", str(chain))
    run_cli(
        "simulate", "--chain", str(chain), "--steps", "5000", "--seed", "42", "--out", str(path)
    )
    return {"root": root, "chain": str(chain), "path": str(path)}


class TestChainsMake:
    def test_two_state_fixture(self, workdir):
        doc = json.loads(open(workdir["chain"]).read())
        assert doc["P"] == [[0.9, 0.1], [0.5, 0.5]]

    def test_uniform_rows_at_matching_beta(self, workdir):
        out = workdir["root"] / "uniform.json"
        run_cli("chains", "make", "--family", "lazy-uniform", "--d", "4", "--beta", "0.75",
                "--out", str(out))
        doc = json.loads(out.read_text())
        assert doc["P"] == [[0.25] * 4] * 4

    def test_perturbed_uniform_offdiagonal(self, workdir):
        out = workdir["root"] / "pu.json"
        run_cli("chains", "make", "--family", "perturbed-uniform-0", "--d", "4",
                "--gammabar", "0.25", "--out", str(out))
        doc = json.loads(out.read_text())
        assert doc["P"][0][1] == 0.125

    def test_bad_params_exit_2_with_usage(self, workdir):
        out = workdir["root"] / "never.json"
        proc = run_cli("chains", "make", "--family", "two-state-A", "--pibar", "0.9",
                       "--out", str(out), check=False)
        assert proc.returncode == 2
        assert b"usage" in proc.stderr.lower()
        assert not out.exists()


class TestSimulate:
    def test_round_trip_matches_library(self, workdir):
        chain = load_chain(workdir["chain"])
        expected = simulate_path(chain, 5000, "stationary", 42)
        on_disk = load_path(workdir["path"])
        assert on_disk.d == expected.d
        np.testing.assert_array_equal(on_disk.states, expected.states)

    def test_byte_identical_reruns(self, workdir):
        a = workdir["root"] / "a.txt"
        b = workdir["root"] / "b.txt"
        for out in (a, b):
            run_cli("simulate", "--chain", workdir["chain"], "--steps", "300", "--seed", "7",
                    "--init", "state:1", "--out", str(out))
        assert a.read_bytes() == b.read_bytes()

    def test_missing_chain_file_exit_1(self, workdir):
        proc = run_cli("simulate", "--chain", "/nonexistent.json", "--steps", "10",
                       "--seed", "1", "--out", str(workdir["root"] / "x.txt"), check=False)
        assert proc.returncode == 1

    def test_bad_init_exit_2(self, workdir):
        proc = run_cli("simulate", "--chain", workdir["chain"], "--steps", "10", "--seed", "1",
                       "--init", "state:9", "--out", str(workdir["root"] / "x.txt"), check=False)
        assert proc.returncode == 2


class TestEstimate:
    def test_plugin_equals_library_bit_for_bit(self, workdir):
        proc = run_cli("estimate", "--path", workdir["path"])
        doc = json.loads(proc.stdout)
        est = plugin_estimate(collect_statistics(load_path(workdir["path"])))
        assert doc["gamma_hat"] == est.gamma_hat
        assert doc["pimin_hat"] == est.pimin_hat
        assert doc["eigenvalues"] == est.eigenvalues_hat.tolist()
        assert doc["degenerate"] is False

    def test_bootstrap_reports_doubling_trace(self, workdir):
        proc = run_cli("estimate", "--path", workdir["path"], "--method", "bootstrap")
        doc = json.loads(proc.stdout)
        est = bootstrap_estimate(load_path(workdir["path"]))
        assert doc["gamma_tilde"] == est.gamma_tilde
        assert doc["A"] == est.A
        assert doc["per_level"] == [[a, g] for a, g in est.per_level]

    def test_unreadable_path_exit_1(self, workdir):
        proc = run_cli("estimate", "--path", str(workdir["root"] / "ghost.txt"), check=False)
        assert proc.returncode == 1
        assert proc.stderr.strip()

    def test_short_path_exit_3(self, workdir):
        short = workdir["root"] / "short.txt"
        short.write_text("0\n")
        proc = run_cli("estimate", "--path", str(short), check=False)
        assert proc.returncode == 3


class TestCi:
    def test_schema_and_certificate(self, workdir):
        proc = run_cli("ci", "--path", workdir["path"], "--delta", "0.1")
        doc = json.loads(proc.stdout)
        assert doc["schema"] == 1 and doc["kind"] == "interval_report"
        assert doc["combined"] is None
        assert 0.0 <= doc["gap_interval"][0] <= doc["gap_interval"][1] <= 1.0
        assert doc["certificate"]["t_hat"] > 0

    def test_small_path_clips_and_flags_fallback(self, workdir):
        tiny = workdir["root"] / "tiny.txt"
        tiny.write_text("d=2\n0\n1\n0\n1\n")
        proc = run_cli("ci", "--path", str(tiny), "--delta", "0.1", "--combined")
        doc = json.loads(proc.stdout)
        assert doc["gap_interval"] == [0.0, 1.0]
        assert doc["combined"]["fallback"] is True

    def test_combined_nested_in_certificate_interval(self, workdir):
        big = workdir["root"] / "big.txt"
        chain = load_chain(workdir["chain"])
        from mixcert.io import save_path

        save_path(simulate_path(chain, 10**5, "stationary", 11), str(big))
        proc = run_cli("ci", "--path", str(big), "--delta", "0.1", "--combined")
        doc = json.loads(proc.stdout)
        c = doc["combined"]
        assert c["fallback"] is False
        assert doc["gap_interval"][0] <= c["V"][0] <= c["V"][1] <= doc["gap_interval"][1]
        assert c["confidence"] == 0.8


class TestValidate:
    def test_byte_identical_across_jobs(self, workdir):
        outs = []
        for jobs in ("1", "4", "1"):
            proc = run_cli("validate", "coverage", "--chain", workdir["chain"], "--trials", "6",
                           "--steps", "1500", "--delta", "0.1", "--seed", "9", "--jobs", jobs)
            outs.append(proc.stdout)
        assert outs[0] == outs[1] == outs[2]

    def test_env_var_override(self, workdir):
        base = run_cli("validate", "coverage", "--chain", workdir["chain"], "--trials", "4",
                       "--steps", "1000", "--delta", "0.1", "--seed", "2")
        forced = run_cli("validate", "coverage", "--chain", workdir["chain"], "--trials", "4",
                         "--steps", "1000", "--delta", "0.1", "--seed", "2",
                         env_extra={"MIXCERT_JOBS": "3"})
        assert base.stdout == forced.stdout

    def test_width_and_accuracy_run(self, workdir):
        wproc = run_cli("validate", "width", "--chain", workdir["chain"], "--trials", "4",
                        "--steps", "1000,4000", "--delta", "0.1", "--seed", "3")
        wdoc = json.loads(wproc.stdout)
        assert wdoc["kind"] == "width_report" and len(wdoc["mean_w_ratios"]) == 1
        aproc = run_cli("validate", "accuracy", "--chain", workdir["chain"], "--trials", "4",
                        "--steps", "1000,4000", "--seed", "3")
        adoc = json.loads(aproc.stdout)
        assert adoc["kind"] == "accuracy_report" and adoc["weyl_violations"] == 0

    def test_decreasing_grid_rejected(self, workdir):
        proc = run_cli("validate", "width", "--chain", workdir["chain"], "--trials", "2",
                       "--steps", "4000,1000", "--delta", "0.1", "--seed", "1", check=False)
        assert proc.returncode == 2


class TestStoprule:
    def test_trace_equals_library(self, workdir):
        proc = run_cli("stoprule", "--chain", workdir["chain"], "--epsilon", "0.8",
                       "--delta", "0.2", "--seed", "21", "--max-steps", "131072")
        doc = json.loads(proc.stdout)
        chain = load_chain(workdir["chain"])
        trace = stopping_rule(SimulatedSource(chain, "stationary", 21, 131072), 0.8, 0.2)
        assert doc["stopped"] == trace.stopped
        assert doc["final_n"] == trace.final_n
        assert len(doc["entries"]) == len(trace.entries)
        for got, exp in zip(doc["entries"], trace.entries):
            assert got["n"] == exp.n
            assert got["gap_interval"] == list(exp.gap_interval)
            assert got["pimin_ratio"] == exp.pimin_ratio

    def test_budget_exhaustion_exit_zero(self, workdir):
        proc = run_cli("stoprule", "--chain", workdir["chain"], "--epsilon", "0.01",
                       "--delta", "0.1", "--seed", "5", "--max-steps", "64")
        doc = json.loads(proc.stdout)
        assert proc.returncode == 0
        assert doc["stopped"] is False and doc["exhausted"] is True


class TestArgumentErrors:
    def test_missing_required_exit_2(self):
        proc = run_cli("estimate", check=False)
        assert proc.returncode == 2

    def test_unknown_command_exit_2(self):
        proc = run_cli("frobnicate", check=False)
        assert proc.returncode == 2
