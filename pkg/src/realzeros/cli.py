"""Command-line entry point: ``realzeros <subcommand> ...``."""
from __future__ import annotations

import argparse
import csv
import json
import sys

from .asymptotics import predicted_total
from .covariance import model_from_dict, validate
from .errors import ConfigError, OutsideWindow, ParseError, RealZerosError
from .harness import ExperimentConfig, compare, run
from .kac_rice import expected_zeros, expected_zeros_total, partition_counts
from .moments import (
    asymptotic_context,
    moments_asymptotic,
    moments_diagonal,
    moments_direct,
    moments_spectral,
)
from .simulation import default_workers, simulate


def _model(text: str):
    try:
        return model_from_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"model is not valid JSON: {exc}") from exc
    except (ValueError, KeyError, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _writer(out):
    return csv.writer(out, lineterminator="\n")


def cmd_validate(args) -> int:
    report = validate(args.model)
    print(json.dumps(report.to_dict(), indent=2))
    return 0 if report.ok else 1


def cmd_moments(args) -> int:
    w = _writer(sys.stdout)
    w.writerow(["method", "n", "x", "A", "B", "C", "AC_minus_B2"])
    n, x, model = args.n, args.x, args.model
    triples = []
    for method in args.methods.split(","):
        if method == "direct":
            triples.append(moments_direct(model, n, x))
        elif method == "diagonal":
            triples.append(moments_diagonal(model, n, x))
        elif method == "spectral":
            if abs(x) < 1 and model.has_density:
                triples.append(moments_spectral(model, n, x))
        elif method == "asymptotic":
            if model.has_density and 0 < abs(x) < 1:
                try:
                    ctx = asymptotic_context(model, n, x)
                    triples.append(moments_asymptotic(ctx, "positive" if x > 0 else "negative"))
                except (OutsideWindow, RealZerosError) as exc:
                    print(f"# asymptotic skipped: {exc}", file=sys.stderr)
        else:
            raise SystemExit(f"unknown method {method!r}")
    for t in triples:
        w.writerow([t.method, t.n, repr(t.x), repr(t.A), repr(t.B), repr(t.C), repr(t.discriminant)])
    return 0


def cmd_expected(args) -> int:
    w = _writer(sys.stdout)
    w.writerow(["interval_lo", "interval_hi", "value", "quad_error", "method"])
    if args.partition:
        rep = partition_counts(args.model, args.n, tol=args.tol)
        ests = list(rep.estimates) + [rep.total_unit]
    elif args.interval:
        ests = [expected_zeros(args.model, args.n, args.interval[0], args.interval[1], tol=args.tol)]
    else:
        ests = []
    ests.append(expected_zeros_total(args.model, args.n, tol=args.tol))
    for e in ests:
        w.writerow([repr(e.interval[0]), repr(e.interval[1]), repr(e.value), repr(e.quad_error), e.method])
    return 0


def cmd_predict(args) -> int:
    p = predicted_total(args.n, args.model_class)
    w = _writer(sys.stdout)
    w.writerow(["n", "law", "value", "error_order"])
    w.writerow([p.n, p.law, repr(p.value), p.error_order])
    return 0


def cmd_simulate(args) -> int:
    summary = simulate(args.model, args.n, args.trials, args.seed, workers=args.workers)
    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    try:
        w = _writer(out)
        w.writerow(["trial", "seed", "count"])
        for i, (seed, count) in enumerate(zip(summary.seeds, summary.per_trial_counts)):
            w.writerow([i, seed, count])
    finally:
        if args.csv:
            out.close()
    text = json.dumps(summary.to_dict(), indent=2)
    if args.summary:
        with open(args.summary, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text, file=sys.stderr)
    return 0


def cmd_run(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    if args.workers is not None:
        cfg.workers = args.workers
    written = run(cfg)
    for kind, path in written.items():
        print(f"{kind}: {path}")
    return 0


def cmd_compare(args) -> int:
    return compare(args.paths)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="realzeros",
        description="Expected real zeros of random polynomials with stationary Gaussian coefficients.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a covariance model")
    p.add_argument("--model", type=_model, required=True, help='JSON, e.g. \'{"kind": "exponential", "rho": 0.3}\'')
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("moments", help="A, B, C at a point by each method")
    p.add_argument("--model", type=_model, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--methods", default="direct,diagonal,spectral,asymptotic")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("expected", help="Kac-Rice expected zero counts")
    p.add_argument("--model", type=_model, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--partition", action="store_true", help="also report the six-interval split")
    p.add_argument("--interval", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_expected)

    p = sub.add_parser("predict", help="leading-order prediction")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--class", dest="model_class", default="nonvanishing_density",
                   choices=["nonvanishing_density", "constant_covariance"])
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("simulate", help="Monte Carlo real-zero counts")
    p.add_argument("--model", type=_model, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None, help="default: $REALZEROS_WORKERS or 1")
    p.add_argument("--csv", help="write per-trial CSV here instead of stdout")
    p.add_argument("--summary", help="write the JSON summary here instead of stderr")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("run", help="run a JSON experiment config")
    p.add_argument("config")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="tabulate result CSVs; exit 2 on MC/Kac-Rice mismatch")
    p.add_argument("paths", nargs="+")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "workers", None) is None and args.command == "simulate":
        args.workers = default_workers()
    try:
        return args.func(args)
    except (ConfigError, ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RealZerosError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
