"""Command-line surface: simulate, theory, oracle, estimate, experiments, lemmas.

Exit codes: 0 success; 2 invalid arguments; 3 estimator domain error in
single-shot estimate mode; 4 non-finite value detected in output.  Every run
echoes its resolved configuration as `# key=value` lines on standard error;
standard output carries summaries (CSV goes to --out, or stdout when the
target is `-`).  Floats are printed with 17 significant digits so reruns are
byte-comparable.
"""

from __future__ import annotations

import argparse
import math
import sys
from contextlib import contextmanager

import numpy as np

from .ar1 import AR1Params, simulate
from .estimator import DomainError, estimate_a1, phi_statistic
from .montecarlo import (
    ExperimentConfig,
    default_bin_count,
    histogram,
    mix_seed,
    normal_cdf,
    run_clt_experiment,
    run_table_experiment,
)
from .noise import PRESET_KINDS, make_preset, spectrum_sums
from .oracle import DEFAULT_QUAD_CAP, report
from .theory import VARIANTS, constants

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_NUMERIC = 4

GUMBEL_DEFAULT_TRUNCATION = 50


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


@contextmanager
def _out_stream(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _write_csv(path, header, rows):
    with _out_stream(path) as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _echo(command: str, pairs):
    print(f"# command={command}", file=sys.stderr)
    for key, value in pairs:
        print(f"# {key}={_fmt(value)}", file=sys.stderr)


def _finite(values) -> bool:
    arr = np.asarray([v for v in values if v is not None], dtype=float)
    return bool(np.isfinite(arr).all())


def _numeric_failure(what: str) -> int:
    print(f"error: non-finite value in {what}", file=sys.stderr)
    return EXIT_NUMERIC


def _build_spec(args):
    truncation = getattr(args, "truncation", None)
    if args.noise == "gumbel" and truncation is None:
        truncation = GUMBEL_DEFAULT_TRUNCATION
    return make_preset(args.noise, args.sigma, truncation)


def _noise_pairs(args, spec):
    pairs = [("noise", args.noise), ("sigma", args.sigma)]
    if args.noise == "gumbel":
        pairs.append(("truncation", len(spec.sigmas) // 2))
    pairs.append(("weights", len(spec.sigmas)))
    return pairs


def _add_noise_flags(parser):
    parser.add_argument("--noise", choices=PRESET_KINDS, default="chi2",
                        help="innovation preset (default: chi2)")
    parser.add_argument("--sigma", type=float, default=1.0,
                        help="noise scale sigma > 0, same units as y (default: 1.0)")
    parser.add_argument("--truncation", type=int, default=None,
                        help="gumbel series truncation depth >= 1 "
                             f"(default: {GUMBEL_DEFAULT_TRUNCATION}; other presets ignore it)")


def _add_out_flag(parser, what):
    parser.add_argument("--out", default="-",
                        help=f"{what} destination path, `-` for stdout (default: -)")


# ---------------------------------------------------------------- simulate

def _cmd_simulate(args) -> int:
    spec = _build_spec(args)
    params = AR1Params(args.a0, args.a1, args.y0)
    traj = simulate(params, spec, args.n, args.seed)
    if not (_finite(traj.y) and _finite(traj.drift)):
        return _numeric_failure("trajectory")
    _echo("simulate", [
        ("a0", args.a0), ("a1", args.a1), ("y0", args.y0),
        *_noise_pairs(args, spec),
        ("n", args.n), ("seed", args.seed), ("out", args.out),
    ])
    rows = [(0, traj.y[0], traj.drift[0], None)]
    rows += [(i, traj.y[i], traj.drift[i], traj.centered[i - 1]) for i in range(1, args.n + 1)]
    _write_csv(args.out, ("index", "y", "drift", "centered"), rows)
    return EXIT_OK


# ------------------------------------------------------------------ theory

def _parse_grid(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError("--a1-grid expects lo:hi:count")
    lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise ValueError("--a1-grid count must be >= 1")
    return np.linspace(lo, hi, count)


def _cmd_theory(args) -> int:
    spec = _build_spec(args)
    variants = VARIANTS if args.variant == "both" else (args.variant,)
    grid = _parse_grid(args.a1_grid) if args.a1_grid else [args.a1]
    for a1 in grid:
        if not abs(a1) < 1.0:
            raise ValueError(f"|a1| must be < 1, got {a1}")
        if a1 == 0:
            # est_var has a pole at a1 = 0; keep the CSV finite
            raise ValueError("a1 must be nonzero for theory constants")
    _echo("theory", [
        ("a1", args.a1), ("a1_grid", args.a1_grid),
        *_noise_pairs(args, spec),
        ("variant", args.variant), ("out", args.out),
    ])
    rows = []
    for a1 in grid:
        for variant in variants:
            rows.extend(constants(float(a1), spec, variant).as_rows())
    if not _finite(row[-1] for row in rows):
        return _numeric_failure("theory constants")
    if args.a1_grid:
        out_rows = []
        i = 0
        per_a1 = len(rows) // len(grid)
        for a1 in grid:
            for _ in range(per_a1):
                out_rows.append((float(a1), *rows[i]))
                i += 1
        _write_csv(args.out, ("a1", "name", "variant", "value"), out_rows)
    else:
        _write_csv(args.out, ("name", "variant", "value"), rows)
    return EXIT_OK


# ------------------------------------------------------------------ oracle

def _cmd_oracle(args) -> int:
    spec = _build_spec(args)
    rep = report(args.n, args.a1, spec, include_contractions=args.contractions, cap=args.cap)
    rows = rep.as_rows()
    if not _finite(row[-1] for row in rows):
        return _numeric_failure("oracle report")
    _echo("oracle", [
        ("n", args.n), ("a1", args.a1),
        *_noise_pairs(args, spec),
        ("contractions", args.contractions), ("cap", args.cap), ("out", args.out),
    ])
    _write_csv(args.out, ("quantity", "n", "value"), rows)
    return EXIT_OK


# ---------------------------------------------------------------- estimate

def _cmd_estimate(args) -> int:
    _echo("estimate", [
        ("qn", args.qn), ("sigma", args.sigma), ("clamp", args.clamp),
        ("a1_true", args.a1_true), ("n", args.n), ("normalization", args.normalization),
    ])
    clamped = False
    try:
        a_hat = estimate_a1(args.qn, args.sigma).a_hat
    except DomainError as exc:
        if not args.clamp:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_DOMAIN
        a_hat = 0.0
        clamped = True
    pairs = [("qn", args.qn), ("sigma", args.sigma),
             ("a_hat", a_hat), ("clamped", clamped)]
    if args.a1_true is not None:
        if args.n is None:
            raise ValueError("--a1-true needs --n for the studentized statistic")
        phi = phi_statistic(a_hat, args.a1_true, args.n, args.normalization)
        pairs += [("normalization", args.normalization), ("phi", phi)]
    if not _finite(v for _, v in pairs if isinstance(v, float)):
        return _numeric_failure("estimate")
    for key, value in pairs:
        print(f"{key}={_fmt(value)}")
    return EXIT_OK


# ------------------------------------------------------------- experiments

def _experiment_config(args, kind: str):
    spec = _build_spec(args)
    params = AR1Params(args.a0, args.a1, args.y0)
    sigma_est = math.sqrt(spectrum_sums(spec)[0])
    config = ExperimentConfig(
        params=params, spec=spec, n=args.n, replications=args.replications,
        sigma=sigma_est, master_seed=args.master_seed,
        normalization=getattr(args, "normalization", "published"),
        centering=args.centering, workers=args.workers,
    )
    pairs = [
        ("a0", args.a0), ("a1", args.a1), ("y0", args.y0),
        *_noise_pairs(args, spec),
        ("n", args.n), ("replications", args.replications),
        ("sigma_est", sigma_est),
        ("master_seed", args.master_seed),
        ("seed_mixer", "splitmix64"),
        ("seed_first", mix_seed(args.master_seed, 0)),
        ("seed_last", mix_seed(args.master_seed, args.replications - 1)),
        ("workers", args.workers), ("centering", args.centering),
    ]
    if kind == "clt":
        pairs.append(("normalization", args.normalization))
    _echo(f"experiment-{kind}", pairs)
    return config


def _write_replications(path, summary):
    _write_csv(path, ("replication", "qn", "a_hat", "phi", "status"),
               summary.per_replication)


def _print_summary(kind: str, summary) -> int:
    pairs = [("experiment", kind)] + summary.summary_pairs()
    floats = [v for _, v in pairs if isinstance(v, float)]
    if not _finite(floats):
        return _numeric_failure("experiment summary")
    for key, value in pairs:
        print(f"{key}={_fmt(value)}")
    return EXIT_OK


def _cmd_experiment_table(args) -> int:
    config = _experiment_config(args, "table")
    try:
        summary = run_table_experiment(config)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        _write_replications(args.out, summary)
    return _print_summary("table", summary)


def _cmd_experiment_clt(args) -> int:
    config = _experiment_config(args, "clt")
    try:
        summary = run_clt_experiment(config)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        _write_replications(args.out, summary)
    phis = sorted(row[3] for row in summary.per_replication if row[4] == "ok")
    if args.histogram_out:
        bins = args.bins if args.bins is not None else default_bin_count(config.replications)
        _write_csv(args.histogram_out, ("bin_left", "bin_right", "count"),
                   histogram(phis, bins))
    if args.ecdf_out:
        m = len(phis)
        rows = [(x, (i + 1) / m, normal_cdf(x)) for i, x in enumerate(phis)]
        _write_csv(args.ecdf_out, ("x", "f_emp", "f_normal"), rows)
    return _print_summary("clt", summary)


# ------------------------------------------------------------------ lemmas

def _cmd_lemmas(args) -> int:
    spec = _build_spec(args)
    _echo("lemmas", [
        ("n", " ".join(str(n) for n in args.n)), ("a1", args.a1),
        *_noise_pairs(args, spec),
        ("cap", args.cap), ("out", args.out),
    ])
    rows = []
    bounds_ok: dict[str, bool] = {}
    for n in args.n:
        rep = report(n, args.a1, spec, include_contractions=True, cap=args.cap)
        for name, value in rep.contractions.items():
            rows.append((name, n, value))
        for name, (lhs, rhs) in rep.bound_gaps.items():
            rows.append((f"{name}_lhs", n, lhs))
            rows.append((f"{name}_rhs", n, rhs))
            bounds_ok[name] = bounds_ok.get(name, True) and lhs <= rhs
    if not _finite(row[-1] for row in rows):
        return _numeric_failure("lemma sums")
    _write_csv(args.out, ("quantity", "n", "value"), rows)
    for name, ok in bounds_ok.items():
        print(f"bounds_ok_{name}={_fmt(ok)}")
    print(f"all_bounds_hold={_fmt(all(bounds_ok.values()))}")
    return EXIT_OK


# ------------------------------------------------------------------ parser

def _add_ar1_flags(parser):
    parser.add_argument("--a0", type=float, default=0.0,
                        help="drift intercept, y units (default: 0.0)")
    parser.add_argument("--a1", type=float, required=True,
                        help="mean-reversion coefficient, |a1| < 1 (required)")
    parser.add_argument("--y0", type=float, default=0.0,
                        help="initial value, y units (default: 0.0)")


def _add_experiment_flags(parser):
    _add_ar1_flags(parser)
    _add_noise_flags(parser)
    parser.add_argument("--n", type=int, required=True,
                        help="observations per replication (required)")
    parser.add_argument("--replications", type=int, required=True,
                        help="replication count >= 2 (required)")
    parser.add_argument("--master-seed", type=int, default=0,
                        help="64-bit master seed; per-replication seeds are "
                             "splitmix64(master, index) (default: 0)")
    parser.add_argument("--workers", type=int, default=1,
                        help="worker threads; output is identical for any value (default: 1)")
    parser.add_argument("--centering", choices=("oracle", "empirical"), default="oracle",
                        help="subtract the true drift (oracle) or the sample mean (default: oracle)")
    parser.add_argument("--out", default=None,
                        help="per-replication CSV path (default: not written)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ar1chaos",
        description="Simulation and verification laboratory for AR(1) series "
                    "driven by second-chaos noise.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="subcommand")

    p = sub.add_parser("simulate", help="write one trajectory as CSV")
    _add_ar1_flags(p)
    _add_noise_flags(p)
    p.add_argument("--n", type=int, required=True, help="number of steps >= 1 (required)")
    p.add_argument("--seed", type=int, default=0, help="generator seed (default: 0)")
    _add_out_flag(p, "trajectory CSV")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("theory", help="closed-form limit constants as CSV")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--a1", type=float, help="single coefficient, 0 < |a1| < 1")
    group.add_argument("--a1-grid", default=None, metavar="LO:HI:COUNT",
                       help="evenly spaced coefficient grid, e.g. 0.09:0.99:50")
    _add_noise_flags(p)
    p.add_argument("--variant", choices=(*VARIANTS, "both"), default="both",
                   help="constant family to emit (default: both)")
    _add_out_flag(p, "constants CSV")
    p.set_defaults(func=_cmd_theory)

    p = sub.add_parser("oracle", help="exact finite-n moments of Q_n as CSV")
    p.add_argument("--n", type=int, required=True, help="sample size >= 1 (required)")
    p.add_argument("--a1", type=float, required=True, help="coefficient, |a1| < 1 (required)")
    _add_noise_flags(p)
    p.add_argument("--contractions", action="store_true",
                   help="include quadruple contraction sums and their bound rows")
    p.add_argument("--cap", type=int, default=DEFAULT_QUAD_CAP,
                   help=f"largest n evaluated by direct summation (default: {DEFAULT_QUAD_CAP})")
    _add_out_flag(p, "oracle CSV")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("estimate", help="single-shot mean-reversion estimate")
    p.add_argument("--qn", type=float, required=True,
                   help="observed quadratic variation (required)")
    p.add_argument("--sigma", type=float, default=1.0,
                   help="known noise scale (default: 1.0)")
    p.add_argument("--clamp", action="store_true",
                   help="return a_hat=0 instead of failing when qn <= 2*sigma^2")
    p.add_argument("--a1-true", type=float, default=None,
                   help="true coefficient; add the studentized statistic to the output")
    p.add_argument("--n", type=int, default=None,
                   help="sample size behind qn (needed with --a1-true)")
    p.add_argument("--normalization", choices=("published", "corrected"), default="published",
                   help="studentization constants (default: published)")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("experiment-table",
                       help="replicated estimation summary (mean/std of a_hat)")
    _add_experiment_flags(p)
    p.set_defaults(func=_cmd_experiment_table)

    p = sub.add_parser("experiment-clt",
                       help="replicated studentized statistic with normal-distance summary")
    _add_experiment_flags(p)
    p.add_argument("--normalization", choices=("published", "corrected", "oracle_exact"),
                   default="oracle_exact",
                   help="phi studentization (default: oracle_exact)")
    p.add_argument("--bins", type=int, default=None,
                   help="histogram bin count (default: ceil(sqrt(replications)))")
    p.add_argument("--histogram-out", default=None,
                   help="histogram CSV path (default: not written)")
    p.add_argument("--ecdf-out", default=None,
                   help="ECDF-vs-normal CSV path (default: not written)")
    p.set_defaults(func=_cmd_experiment_clt)

    p = sub.add_parser("lemmas", help="quadruple contraction sums against their bounds")
    p.add_argument("--n", type=int, nargs="+", required=True,
                   help="sample sizes to evaluate (required, space separated)")
    p.add_argument("--a1", type=float, required=True, help="coefficient, |a1| < 1 (required)")
    _add_noise_flags(p)
    p.add_argument("--cap", type=int, default=DEFAULT_QUAD_CAP,
                   help=f"largest n evaluated by direct summation (default: {DEFAULT_QUAD_CAP})")
    _add_out_flag(p, "lemma CSV")
    p.set_defaults(func=_cmd_lemmas)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
