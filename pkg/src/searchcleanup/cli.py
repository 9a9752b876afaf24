"""Command-line interface for the search-with-cleanup cost library.

Subcommands: ``table`` (optimal pile sizes over a range of n), ``curve``
(cost breakdown over m at fixed n), ``optimal`` (single optimum lookup),
``simulate`` (Monte Carlo estimate), ``verify`` (self-check battery).

CSV output is locale-independent: 12 significant digits, ``.`` decimal
separator, LF line endings, deterministic row order.  ``--plot`` renders
a PNG figure next to the delimited output.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numeric
non-convergence.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import sys

from . import analytic, approx, montecarlo, plotting, verify
from .cost_model import Model
from .occupancy import ConvergenceError, PrecisionConfig, PrecisionLossError

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


def _fmt(value) -> str:
    return "" if value is None else "%.12g" % value


@contextlib.contextmanager
def _open_out(path: str):
    # newline="" so the csv writer controls line endings (always LF)
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _plot_path(args, stem: str) -> str:
    """Explicit --plot PATH wins; otherwise sit next to --out."""
    if args.plot:
        return args.plot
    if args.out != "-":
        base = args.out
        if base.lower().endswith(".csv"):
            base = base[:-4]
        return base + ".png"
    return stem + ".png"


def _note(text: str) -> None:
    print(text, file=sys.stderr)


# -- subcommand handlers ------------------------------------------------------

def cmd_table(args) -> int:
    if args.n_max < 1:
        raise ValueError(f"--n-max must be at least 1, got {args.n_max}")
    model = Model.from_name(args.model)
    cfg = PrecisionConfig(tol=args.tol)
    rows = []
    for n in range(1, args.n_max + 1):
        report = analytic.m_opt(n, model, cfg)
        approx_opt = approx.m_opt_approx(n).m_opt_approx if model is Model.M4 else None
        rows.append((n, report.m_opt, approx_opt))
    with _open_out(args.out) as fh:
        out = _writer(fh)
        out.writerow(["n", "m_opt", "m_opt_approx"])
        for n, m_best, approx_opt in rows:
            out.writerow([n, m_best, "" if approx_opt is None else approx_opt])
    if args.plot is not None:
        path = plotting.save_optimum_figure(
            _plot_path(args, f"table_{args.model}"), args.model, rows)
        _note(f"figure written to {path}")
    return EXIT_OK


def cmd_curve(args) -> int:
    model = Model.from_name(args.model)
    include_approx = args.approx or (not args.exact and model is Model.M4)
    include_exact = args.exact or not args.approx
    if include_approx and model is not Model.M4:
        raise ValueError(
            "the approximate curve is defined only for model m4; drop --approx")
    cfg = PrecisionConfig(tol=args.tol)
    rows = []
    for m in range(1, args.n + 1):
        f_exact = f_list = f_pile = f_cleanup = f_approx = None
        if include_exact:
            br = analytic.f_total(args.n, m, model, cfg)
            f_exact, f_list = br.f_total, br.f_list
            f_pile, f_cleanup = br.f_pile, br.f_cleanup
        if include_approx:
            f_approx = approx.f_tilde(args.n, m)
        rows.append((m, f_exact, f_list, f_pile, f_cleanup, f_approx))
    with _open_out(args.out) as fh:
        out = _writer(fh)
        out.writerow(["m", "f_exact", "f_list", "f_pile", "f_cleanup", "f_approx"])
        for row in rows:
            out.writerow([row[0]] + [_fmt(v) for v in row[1:]])
    if args.plot is not None:
        path = plotting.save_curve_figure(
            _plot_path(args, f"curve_n{args.n}_{args.model}"), args.n,
            args.model, rows)
        _note(f"figure written to {path}")
    return EXIT_OK


def cmd_optimal(args) -> int:
    if args.exact and args.approx:
        raise ValueError("choose one of --exact / --approx, not both")
    model = Model.from_name(args.model)
    if args.approx:
        if model is not Model.M4:
            raise ValueError(
                "the approximate optimum is defined only for model m4; drop --approx")
        curve = approx.m_opt_approx(args.n)
        value = curve.values[curve.m_opt_approx - 1]
        print(f"m_opt_approx={curve.m_opt_approx} f_approx={_fmt(value)}")
        return EXIT_OK
    report = analytic.m_opt(args.n, model, PrecisionConfig(tol=args.tol))
    print(f"m_opt={report.m_opt} f={_fmt(report.f_at_opt)}")
    if report.tie_broken:
        _note("note: another pile size matches the minimum within numerical error")
    return EXIT_OK


def cmd_simulate(args) -> int:
    model = Model.from_name(args.model)
    dist = montecarlo.Distribution.parse(args.dist, args.n)
    report = montecarlo.estimate_f(
        args.n, args.m, model, dist, args.trials, args.seed, workers=args.workers)
    lo, hi = report.ci95()
    print(f"mean {_fmt(report.mean)}")
    print(f"std_err {_fmt(report.std_err)}")
    print(f"ci95 {_fmt(lo)} {_fmt(hi)}")
    print(f"trials {report.trials}")
    print(f"seed {report.seed}")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = []
    for result in verify.run_battery(args.level, workers=args.workers):
        results.append(result)
        print(f"[{result.status:>4}] {result.name:<26} {result.seconds:7.2f}s  "
              f"{result.detail}", flush=True)
    hard = [r for r in results if not r.probe]
    failed = [r for r in hard if not r.passed]
    flagged = [r for r in results if r.probe and r.passed is False]
    print(f"checks: {len(hard) - len(failed)}/{len(hard)} passed, "
          f"{len(results) - len(hard)} probe lines ({len(flagged)} flagged)")
    return EXIT_OK if not failed else EXIT_VERIFY_FAILED


# -- parser -------------------------------------------------------------------

def _add_model(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", default="m4", choices=["m1", "m2", "m3", "m4"],
                   help="memory/shelf model (default m4: complete memory, "
                        "numbered shelves)")


def _add_out(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default="-", metavar="PATH",
                   help="output file, '-' for standard output (default)")
    p.add_argument("--plot", nargs="?", const="", default=None, metavar="PATH",
                   help="also render a PNG figure (default path: next to --out)")


def _add_tol(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=1e-10,
                   help="relative tolerance for the exact-moment routines "
                        "(default 1e-10)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="searchcleanup",
        description="Expected search cost under periodic pile cleanup: exact "
                    "curves, a closed-form approximation, optimizers, Monte "
                    "Carlo estimates, and a verification battery.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table", help="optimal pile size for every n up to --n-max")
    p.add_argument("--n-max", type=int, required=True, metavar="N")
    _add_model(p)
    _add_tol(p)
    _add_out(p)
    p.set_defaults(handler=cmd_table)

    p = sub.add_parser("curve", help="cost breakdown over m = 1..n at fixed n")
    p.add_argument("--n", type=int, required=True)
    _add_model(p)
    p.add_argument("--exact", action="store_true",
                   help="emit only the exact columns")
    p.add_argument("--approx", action="store_true",
                   help="emit the approximate column (m4 only); alone, skips "
                        "the exact columns")
    _add_tol(p)
    _add_out(p)
    p.set_defaults(handler=cmd_curve)

    p = sub.add_parser("optimal", help="pile size minimizing the per-search cost")
    p.add_argument("--n", type=int, required=True)
    _add_model(p)
    p.add_argument("--exact", action="store_true", help="exact optimum (default)")
    p.add_argument("--approx", action="store_true", help="approximate optimum (m4 only)")
    _add_tol(p)
    p.set_defaults(handler=cmd_optimal)

    p = sub.add_parser("simulate", help="Monte Carlo estimate of the per-search cost")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    _add_model(p)
    p.add_argument("--dist", default="uniform", metavar="SPEC",
                   help="uniform | zipf[:s=<x>] | skewed:r=<i>,eps=<x> | "
                        "custom:<path> (default uniform)")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1,
                   help="parallel simulation workers (results are identical "
                        "for any worker count)")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("verify", help="run the self-check battery")
    p.add_argument("--level", default="quick", choices=["quick", "full"])
    p.add_argument("--workers", type=int, default=1,
                   help="workers for the Monte Carlo checks")
    p.set_defaults(handler=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ConvergenceError, PrecisionLossError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
