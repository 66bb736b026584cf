"""Command-line interface.

Machine-readable JSON always goes to stdout (or to --out files); human
summaries and diagnostics go to stderr, so stdout is byte-identical across
reruns with the same arguments and seed. Exit codes: 0 success, 1 I/O or
parse failure, 2 bad arguments, 3 violated data precondition.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import harness, io
from .chains import FAMILY_NAMES, chain_family
from .errors import BadInitError, BadParamsError, MixcertError
from .estimators import bootstrap_estimate, plugin_estimate
from .intervals import (
    IntervalReport,
    SimulatedSource,
    empirical_intervals,
    stopping_rule,
)
from .pathstats import collect_statistics
from .serialize import dumps

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_DATA = 3


def _emit(doc: dict, out: str | None = None) -> None:
    text = dumps(doc) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _note(msg: str) -> None:
    sys.stderr.write(msg + "\n")


def _parse_steps(text: str) -> list[int]:
    try:
        grid = [int(tok) for tok in text.split(",") if tok]
    except ValueError as exc:
        raise BadParamsError(f"bad --steps value {text!r}") from exc
    if not grid or any(n < 2 for n in grid):
        raise BadParamsError("--steps entries must be integers >= 2")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise BadParamsError("--steps grid must be strictly increasing")
    return grid


def _jobs(args) -> int:
    env = os.environ.get("MIXCERT_JOBS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise BadParamsError(f"bad MIXCERT_JOBS value {env!r}") from exc
    return max(1, args.jobs)


def _cmd_chains_make(args) -> int:
    params = {}
    for key in ("pibar", "d", "gammabar", "index", "beta"):
        val = getattr(args, key)
        if val is not None:
            params[key] = val
    chain = chain_family(args.family, **params)
    io.save_chain(chain, args.out)
    _note(f"wrote {args.family} chain (d={chain.d}) to {args.out}")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    from .chains import simulate_path

    chain = io.load_chain(args.chain)
    path = simulate_path(chain, args.steps, args.init, args.seed)
    io.save_path(path, args.out)
    _note(f"wrote {path.n} steps (d={path.d}) to {args.out}")
    return EXIT_OK


def _estimate_doc(path, method: str) -> dict:
    if method == "plugin":
        est = plugin_estimate(collect_statistics(path))
        return {
            "schema": 1,
            "kind": "estimate",
            "method": "plugin",
            "n": path.n,
            "d": path.d,
            "gamma_hat": est.gamma_hat,
            "pimin_hat": est.pimin_hat,
            "degenerate": est.degenerate,
            "eigenvalues": est.eigenvalues_hat,
        }
    est = bootstrap_estimate(path)
    plug = plugin_estimate(collect_statistics(path))
    return {
        "schema": 1,
        "kind": "estimate",
        "method": "bootstrap",
        "n": path.n,
        "d": path.d,
        "gamma_tilde": est.gamma_tilde,
        "pimin_hat": plug.pimin_hat,
        "A": est.A,
        "per_level": [[a, g] for a, g in est.per_level],
    }


def _cmd_estimate(args) -> int:
    path = io.load_path(args.path)
    _emit(_estimate_doc(path, args.method))
    return EXIT_OK


def interval_report_doc(report: IntervalReport, cert=None) -> dict:
    """Stable-schema dictionary form of an IntervalReport (schema 1)."""
    doc = {
        "schema": 1,
        "kind": "interval_report",
        "n": report.n,
        "d": report.d,
        "delta": report.delta,
    }
    if cert is not None:
        doc["certificate"] = {
            "t_hat": cert.t_hat,
            "kappa_hat": cert.kappa_hat,
            "b_hat": cert.b_hat,
            "rho_hat": cert.rho_hat,
            "w_hat": cert.w_hat,
            "B_max": float(cert.B_hat.max()),
            "B_hat": cert.B_hat,
            "pi_hat": cert.pi_hat,
            "gamma_hat": cert.gamma_hat,
            "eigenvalues": cert.eigenvalues_hat,
            "group_inverse_residuals": list(cert.group_inverse_residuals),
        }
    doc.update(
        {
            "pi_intervals": report.pi_intervals,
            "pimin_interval": list(report.pimin_interval),
            "gap_interval": list(report.gap_interval),
            "pimin_lb": report.pimin_lb,
            "gap_lb": report.gap_lb,
            "tmix_interval": list(report.tmix_interval),
        }
    )
    if report.combined is None:
        doc["combined"] = None
    else:
        c = report.combined
        doc["combined"] = {
            "confidence": 1.0 - 2.0 * report.delta,
            "C": c.C,
            "C_prime": c.C_prime,
            "fallback": c.fallback,
            "gamma_plugin": c.gamma_plugin,
            "pimin_plugin": c.pimin_plugin,
            "w_prime": c.w_prime,
            "b_prime": c.b_prime,
            "U": list(c.U),
            "V": list(c.V),
            "tmix_interval": list(c.tmix_interval),
        }
    return doc


def _cmd_ci(args) -> int:
    from .intervals import combine_with_plugin

    path = io.load_path(args.path)
    cert, report = empirical_intervals(path, args.delta)
    if args.combined:
        plug = plugin_estimate(collect_statistics(path))
        report = combine_with_plugin(report, plug, C=args.constant)
    _emit(interval_report_doc(report, cert))
    return EXIT_OK


def _cmd_validate(args) -> int:
    if args.trials < 1:
        raise BadParamsError("--trials must be at least 1")
    chain = io.load_chain(args.chain)
    grid = _parse_steps(args.steps)
    jobs = _jobs(args)
    if args.experiment == "coverage":
        if len(grid) != 1:
            raise BadParamsError("coverage takes a single --steps value")
        report = harness.run_coverage(
            chain, grid[0], args.trials, args.delta, args.seed, jobs=jobs, init=args.init
        )
    elif args.experiment == "width":
        report = harness.run_width(
            chain, grid, args.trials, args.delta, args.seed, jobs=jobs, init=args.init
        )
    else:
        report = harness.run_accuracy(chain, grid, args.trials, args.seed, jobs=jobs, init=args.init)
    _emit(report.to_json_dict())
    _note(f"{args.experiment}: {args.trials} trials in {report.wall_clock_s:.2f}s (jobs={jobs})")
    return EXIT_OK


def _cmd_stoprule(args) -> int:
    chain = io.load_chain(args.chain)
    source = SimulatedSource(chain, args.init, args.seed, args.max_steps)
    trace = stopping_rule(source, args.epsilon, args.delta, C=args.constant)
    doc = {
        "schema": 1,
        "kind": "stopping_trace",
        "epsilon": trace.epsilon,
        "delta": trace.delta,
        "C": trace.C,
        "seed": args.seed,
        "init": args.init,
        "max_steps": args.max_steps,
        "stopped": trace.stopped,
        "exhausted": trace.exhausted,
        "final_n": trace.final_n,
        "entries": [
            {
                "k": e.k,
                "n": e.n,
                "delta_k": e.delta_k,
                "pimin_interval": list(e.pimin_interval),
                "gap_interval": list(e.gap_interval),
                "pimin_ratio": e.pimin_ratio,
                "gap_ratio": e.gap_ratio,
                "stopped_here": e.stopped_here,
            }
            for e in trace.entries
        ],
    }
    _emit(doc)
    state = f"stopped at n={trace.final_n}" if trace.stopped else "did not stop"
    _note(f"stoprule: {state} after {len(trace.entries)} evaluations")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mixcert",
        description="Spectral gap, pi_min and mixing-time confidence intervals "
        "for reversible Markov chains from a single sample path.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p_chains = sub.add_parser("chains", help="chain file utilities")
    chains_sub = p_chains.add_subparsers(dest="chains_command", required=True)
    p_make = chains_sub.add_parser("make", help="write a built-in chain family to JSON")
    p_make.add_argument("--family", required=True, choices=FAMILY_NAMES)
    p_make.add_argument("--pibar", type=float)
    p_make.add_argument("--d", type=int)
    p_make.add_argument("--gammabar", type=float)
    p_make.add_argument("--index", type=int)
    p_make.add_argument("--beta", type=float)
    p_make.add_argument("--out", required=True)
    p_make.set_defaults(func=_cmd_chains_make)

    p_sim = sub.add_parser("simulate", help="simulate a path from a chain file")
    p_sim.add_argument("--chain", required=True)
    p_sim.add_argument("--steps", type=int, required=True)
    p_sim.add_argument("--seed", type=int, required=True)
    p_sim.add_argument("--init", default="stationary", help="stationary | uniform | state:<i>")
    p_sim.add_argument("--out", required=True)
    p_sim.set_defaults(func=_cmd_simulate)

    p_est = sub.add_parser("estimate", help="point estimates from a path file")
    p_est.add_argument("--path", required=True)
    p_est.add_argument("--method", choices=("plugin", "bootstrap"), default="plugin")
    p_est.set_defaults(func=_cmd_estimate)

    p_ci = sub.add_parser("ci", help="confidence intervals from a path file")
    p_ci.add_argument("--path", required=True)
    p_ci.add_argument("--delta", type=float, required=True)
    p_ci.add_argument("--combined", action="store_true")
    p_ci.add_argument("--constant", type=float, default=1.0, help="absolute constant C")
    p_ci.set_defaults(func=_cmd_ci)

    p_val = sub.add_parser("validate", help="Monte Carlo validation experiments")
    p_val.add_argument("experiment", choices=("coverage", "width", "accuracy"))
    p_val.add_argument("--chain", required=True)
    p_val.add_argument("--trials", type=int, required=True)
    p_val.add_argument("--steps", required=True, help="n or comma-separated increasing grid")
    p_val.add_argument("--delta", type=float, default=0.1)
    p_val.add_argument("--seed", type=int, required=True)
    p_val.add_argument("--jobs", type=int, default=1)
    p_val.add_argument("--init", default="stationary")
    p_val.set_defaults(func=_cmd_validate)

    p_stop = sub.add_parser("stoprule", help="doubling stopping rule on a simulated chain")
    p_stop.add_argument("--chain", required=True)
    p_stop.add_argument("--epsilon", type=float, required=True)
    p_stop.add_argument("--delta", type=float, required=True)
    p_stop.add_argument("--seed", type=int, required=True)
    p_stop.add_argument("--max-steps", type=int, required=True)
    p_stop.add_argument("--constant", type=float, default=1.0)
    p_stop.add_argument("--init", default="stationary")
    p_stop.set_defaults(func=_cmd_stoprule)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (BadParamsError, BadInitError) as exc:
        _note(f"error: {exc}")
        _note(ap.format_usage().rstrip())
        return EXIT_USAGE
    except (io.FormatError, OSError) as exc:
        _note(f"error: {exc}")
        return EXIT_IO
    except MixcertError as exc:
        _note(f"error: {exc}")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
