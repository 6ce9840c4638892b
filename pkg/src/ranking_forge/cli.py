"""Command-line front end.

Exit codes: 0 success, 1 a violation or value mismatch was found (the run
itself was fine), 2 usage error, 3 resource limit hit.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import experiments, lpmodel, simplex
from .gains import PriceTable
from .graphs import FAMILIES, SizeLimitError, generate_family
from .lpmodel import build_lp, evaluate_price_table, export_mps, write_compact_mps
from .ranks import EnumerationLimitError

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

#: Largest bucket count solved in-process by default.
IN_PROCESS_K_LIMIT = 12
#: Beyond this, exports switch to the compact streaming form.
DIRECT_EXPORT_LIMIT = 40


def _jobs_default() -> int:
    env = os.environ.get("RANKING_FORGE_JOBS")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ranking-forge",
        description="Randomized greedy matching and its factor-revealing LP.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve-lp", help="build and solve the LP for k buckets")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--export", metavar="PATH", help="also write an MPS file")
    p.add_argument("--tol", type=float, default=1e-4,
                   help="tolerance against the published value, if known")
    p.add_argument("--form", choices=("substituted", "naive", "compact"),
                   default="substituted")
    p.add_argument("--max-k-in-process", type=int, default=IN_PROCESS_K_LIMIT)

    p = sub.add_parser("validate-f", help="evaluate a price table file")
    p.add_argument("--file", required=True)
    p.add_argument("--expect", type=float)
    p.add_argument("--tol", type=float, default=1e-3)

    p = sub.add_parser("verify-lemmas", help="run the structural sweep")
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exhaustive", action="store_true",
                   help="enumerate all orders and rank vectors up to max-n "
                        "(default: sampled orders only)")
    p.add_argument("--jobs", type=int, default=_jobs_default())
    p.add_argument("--skip-random-eight", action="store_true")
    p.add_argument("--report", metavar="PATH", help="write the JSON report")

    p = sub.add_parser("simulate", help="Monte Carlo ratio on a graph family")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--density", type=float, default=0.3)
    p.add_argument("--exact", action="store_true",
                   help="enumerate all orders instead of sampling")

    p = sub.add_parser("reproduce", help="recompute the published LP table")
    p.add_argument("--table1", action="store_true", required=True)
    p.add_argument("--k-max", type=int, default=10)
    p.add_argument("--csv", metavar="PATH")
    return parser


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return _dispatch(args)
    except (SizeLimitError, EnumerationLimitError) as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


def _dispatch(args) -> int:
    return {
        "solve-lp": _cmd_solve_lp,
        "validate-f": _cmd_validate_f,
        "verify-lemmas": _cmd_verify_lemmas,
        "simulate": _cmd_simulate,
        "reproduce": _cmd_reproduce,
    }[args.command](args)


def _cmd_solve_lp(args) -> int:
    k = args.k
    if k < 1:
        print("k must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    exported = None
    if args.export:
        if args.form == "compact" or k > DIRECT_EXPORT_LIMIT:
            stats = write_compact_mps(k, args.export)
            exported = f"{args.export} (compact, {stats['lines']} lines)"
        else:
            export_mps(build_lp(k, form=args.form), args.export)
            exported = args.export
        print(f"exported {exported}")
    if k > args.max_k_in_process:
        if exported:
            print(f"k={k} beyond in-process budget; solve externally")
            return EXIT_OK
        print(
            f"resource limit: k={k} beyond in-process budget "
            f"{args.max_k_in_process}; use --export",
            file=sys.stderr,
        )
        return EXIT_RESOURCE
    form = args.form if args.form != "compact" else "substituted"
    model = build_lp(k, form=form)
    solution = simplex.solve(model)
    if solution.status != "optimal":
        print(f"solver status: {solution.status}", file=sys.stderr)
        return EXIT_VIOLATION
    print(
        f"alpha={solution.alpha:.5f} (k={k}, {solution.iterations} iterations, "
        f"{solution.elapsed:.2f}s)"
    )
    expected = experiments.KNOWN_OPTIMA.get(k)
    if expected is not None and abs(solution.alpha - expected) > args.tol:
        print(f"mismatch: published value is {expected:.5f}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def _cmd_validate_f(args) -> int:
    with open(args.file) as fh:
        table = PriceTable.from_json(fh.read())
    try:
        report = evaluate_price_table(table)
    except ValueError as exc:
        print(f"invalid table: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    print(f"alpha={report.alpha:.5f} (k={table.k})")
    for i, (a, b) in enumerate(zip(report.alpha_i, report.binding), start=1):
        print(f"  alpha_{i}={a:.5f} binding={b}")
    if args.expect is not None and abs(report.alpha - args.expect) > args.tol:
        print(
            f"mismatch: expected {args.expect:.5f} +- {args.tol}",
            file=sys.stderr,
        )
        return EXIT_VIOLATION
    return EXIT_OK


def _cmd_verify_lemmas(args) -> int:
    config = experiments.SweepConfig(
        max_n=args.max_n,
        k=args.k,
        exhaustive=args.exhaustive,
        seed=args.seed,
        jobs=args.jobs,
        with_random_eight=not args.skip_random_eight,
    )
    report = experiments.lemma_sweep(config)
    total = sum(report.claims_checked.values())
    print(
        f"{len(report.violations)} violations across {total} checks "
        f"({report.corpus}, {report.wall_time:.1f}s)"
    )
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(report.to_json())
    return EXIT_OK if report.ok else EXIT_VIOLATION


def _cmd_simulate(args) -> int:
    g = generate_family(args.family, n=args.n, density=args.density, seed=args.seed)
    if args.exact:
        if g.n > 8:
            print("resource limit: exact mode needs n <= 8", file=sys.stderr)
            return EXIT_RESOURCE
        ratio = experiments.exact_expected_ratio(g)
        print(f"ratio={float(ratio):.5f} (exact, {g.n} vertices)")
        return EXIT_OK
    est = experiments.monte_carlo_ratio(g, args.trials, args.k, args.seed)
    print(
        f"ratio={est.mean:.5f} +- {est.half_width:.5f} "
        f"(trials={est.trials}, k={args.k}, seed={args.seed})"
    )
    return EXIT_OK


def _cmd_reproduce(args) -> int:
    if args.k_max > IN_PROCESS_K_LIMIT:
        print(
            f"resource limit: k-max {args.k_max} beyond in-process budget",
            file=sys.stderr,
        )
        return EXIT_RESOURCE
    rows = experiments.reproduce_lp_table(range(1, args.k_max + 1))
    ok = True
    for row in rows:
        mark = ""
        if row.within_tolerance is False:
            mark = "  MISMATCH"
            ok = False
        exp = "" if row.expected is None else f" expected={row.expected:.5f}"
        print(f"k={row.k:3d} alpha={row.alpha:.5f}{exp} ({row.elapsed:.2f}s){mark}")
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(experiments.lp_table_to_csv(rows))
    return EXIT_OK if ok else EXIT_VIOLATION


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
