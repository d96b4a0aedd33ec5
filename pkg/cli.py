"""
Command-line front end.

    python cli.py compute --input problem.json --f relative-entropy,chi-squared
    python cli.py verify --trials 500 --seed 42
    python cli.py inequalities --trials 200 --seed 7

Exit codes: 0 success, 1 validation or parse error, 2 property violation.
"""

import argparse
import logging
import sys
import time

import pandas as pd

from analysis import (
    TrialConfig,
    resolve_functions,
    run_divergence_analysis,
    run_inequalities,
    run_verification,
)
from src.parsing.parser import dump_report, load_problem
from src.quantum.divergence import CATALOG_NAMES
from src.quantum.errors import DivergenceError
from src.quantum.tolerances import DEFAULT_TOLERANCES, Tolerances

logger = logging.getLogger("cli")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_VIOLATION = 2


def _weight_range(value):
    try:
        lo, hi = (float(x) for x in value.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {value!r}")
    if not 0 < lo <= hi:
        raise argparse.ArgumentTypeError(f"weight range must satisfy 0 < LO <= HI, got {value!r}")
    return lo, hi


def _names(value):
    return [n.strip() for n in value.split(",") if n.strip()]


def build_parser():
    parser = argparse.ArgumentParser(prog="cli.py", description="Quantum f-divergences by two independent routes.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for debug.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOLERANCES.agreement,
                        help="Relative agreement tolerance: |ns - direct| <= tol * max(1, |ns|).")
    common.add_argument("--output", choices=["table", "json"], default="table")
    common.add_argument("--timings", action="store_true", help="Include wall-clock timings in JSON output.")

    trials = argparse.ArgumentParser(add_help=False)
    trials.add_argument("--trials", type=int, default=500)
    trials.add_argument("--seed", type=int, default=0)
    trials.add_argument("--max-dim", type=int, default=4)
    trials.add_argument("--max-blocks", type=int, default=3)
    trials.add_argument("--weight-range", type=_weight_range, default=(0.5, 2.0))
    trials.add_argument("--jobs", type=int, default=1, help="Worker threads; results are ordered by trial.")

    compute = sub.add_parser("compute", parents=[common], help="Divergences of one problem file.")
    compute.add_argument("--input", required=True, metavar="PATH")
    compute.add_argument("--f", type=_names, default=["relative-entropy"],
                         help=f"Comma-separated names from: {', '.join(CATALOG_NAMES)}, or 'all'.")
    compute.add_argument("--alpha", type=float, default=None, help="Power-family exponent in (1, 2].")
    compute.add_argument("--route", choices=["ns", "direct", "both"], default="both")
    compute.add_argument("--atoms", action="store_true", help="Include the NS atom table.")
    compute.add_argument("--renyi", type=float, default=None, metavar="ALPHA",
                         help="Also report the Petz-Renyi divergence of order ALPHA.")

    verify = sub.add_parser("verify", parents=[common, trials], help="Randomized two-route agreement check.")
    verify.add_argument("--ranks", choices=["full", "mixed"], default="mixed")
    verify.add_argument("--alpha", type=float, default=None, help="Power-family exponent in (1, 2].")

    sub.add_parser("inequalities", parents=[common, trials], help="Relative-entropy upper bounds on random pairs.")
    return parser


# --- RENDERING ---

def _print_frame(title, frame):
    print(f"\n{title}")
    print(frame.to_string(index=False) if not frame.empty else "(none)")


def render_table(report, elapsed):
    command = report["command"]
    if command == "compute":
        rows = []
        for entry in report["results"]:
            for route, terms in entry["routes"].items():
                rows.append({"divergence": entry["divergence"], "route": route, **terms})
        _print_frame("Divergences", pd.DataFrame(rows))
        deltas = [{k: e[k] for k in ("divergence", "delta", "relative_delta", "agreement")}
                  for e in report["results"] if "delta" in e]
        if deltas:
            _print_frame("Route agreement", pd.DataFrame(deltas))
        for entry in report["results"]:
            if "umegaki" in entry:
                print(f"\nClosed-form relative entropy: {entry['umegaki']}")
        defects = report["support_defects"]
        _print_frame("Support defects [omega(1-s(phi)), phi(1-s(omega))]",
                     pd.DataFrame([{"route": k, "omega(1-s(phi))": v[0], "phi(1-s(omega))": v[1]}
                                   for k, v in defects.items()]))
        if "renyi" in report:
            print(f"\nPetz-Renyi: {report['renyi']}")
        if "atoms" in report:
            atoms = pd.DataFrame(report["atoms"])
            live = atoms["nu"].map(float) > 0
            _print_frame("Nussbaum-Szkola atoms (nu > 0)", atoms[live])
    else:
        summary = report["summary"]
        print(f"\n{command}: " + ", ".join(f"{k}={v}" for k, v in summary.items()))
        key = "failures" if command == "verify" else "violations"
        _print_frame(key.capitalize(), pd.DataFrame(report[key]))
    print(f"\nstatus: {report['status']}  ({elapsed:.2f} s)")


def emit(report, args, elapsed):
    if args.output == "json":
        if args.timings:
            report = {**report, "timings": {"elapsed_seconds": round(elapsed, 6)}}
        sys.stdout.write(dump_report(report))
    else:
        render_table(report, elapsed)


# --- COMMANDS ---

def cmd_compute(args):
    tol = Tolerances(agreement=args.tol)
    spec, phi, omega = load_problem(args.input, tol=tol)
    functions = resolve_functions(args.f, args.alpha)
    return run_divergence_analysis(spec, phi, omega, functions, route=args.route, tol=tol,
                                   renyi=args.renyi, atoms=args.atoms)


def _trial_config(args, **extra):
    if args.trials < 1:
        raise DivergenceError("--trials must be at least 1")
    if args.max_dim < 1 or args.max_blocks < 1:
        raise DivergenceError("--max-dim and --max-blocks must be at least 1")
    return TrialConfig(trials=args.trials, seed=args.seed, max_blocks=args.max_blocks, max_dim=args.max_dim,
                       weight_range=tuple(args.weight_range), tol=args.tol, jobs=max(1, args.jobs), **extra)


def cmd_verify(args):
    return run_verification(_trial_config(args, ranks=args.ranks, alpha=args.alpha))


def cmd_inequalities(args):
    return run_inequalities(_trial_config(args, ranks="full"))


COMMANDS = {"compute": cmd_compute, "verify": cmd_verify, "inequalities": cmd_inequalities}


def main(argv=None):
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)

    start = time.perf_counter()
    try:
        report = COMMANDS[args.command](args)
    except (DivergenceError, OSError) as e:
        logger.debug("%s failed", args.command, exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    emit(report, args, time.perf_counter() - start)
    return EXIT_OK if report["status"] == "ok" else EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
