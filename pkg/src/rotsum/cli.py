"""Command-line interface.

Exit codes: 0 success, 2 usage error, 3 degenerate result (partial outputs
removed), 4 I/O error.  Randomized commands require an explicit --seed; pass
`--seed auto` to let the tool draw one (it is recorded in the manifest).
"""

from __future__ import annotations

import argparse
import csv
import json
import secrets
import sys
from pathlib import Path

import numpy as np

from .arithmetic import (
    BUILTIN_POINTS,
    PrecisionExhausted,
    UnitPoint,
    continued_fraction,
    parse_unit_point,
)
from .distributions import (
    DegenerateSample,
    FitDiverged,
    fit_cauchy,
    fit_gaussian,
    fit_q_gaussian,
)
from .dynamics import Observable, OrbitSpec, ergodic_sum_series
from .experiments import DegenerateNormalization, ExperimentConfig
from .kesten_constant import kesten_report
from . import reporting

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DEGENERATE = 3
EXIT_IO = 4


def _add_common(parser: argparse.ArgumentParser, seeded: bool) -> None:
    if seeded:
        parser.add_argument("--seed", default=None,
                            help="integer seed, or 'auto' to draw and record one")
    parser.add_argument("--workers", type=int, default=None,
                        help="thread count for the orbit loops (never affects results)")
    parser.add_argument("--out-dir", default=".", help="output directory")
    parser.add_argument("--format", choices=("csv", "json"), default="csv",
                        dest="fmt", help="stdout format for tabular results")


def _resolve_seed(raw) -> int:
    if raw is None:
        raise SystemExit2("a --seed is required for randomized commands "
                          "(use --seed auto to draw one)")
    if raw == "auto":
        return secrets.randbits(32)
    try:
        return int(raw)
    except ValueError:
        raise SystemExit2(f"invalid seed {raw!r}")


class SystemExit2(Exception):
    """Usage error detected after argparse."""


def _parse_point(spec: str) -> UnitPoint:
    try:
        return parse_unit_point(spec)
    except ValueError as exc:
        raise SystemExit2(str(exc))


def _observable(args) -> Observable:
    if args.obs == "sawtooth":
        return Observable.sawtooth()
    return Observable.indicator(args.gamma)


# ---------------------------------------------------------------------------
# subcommands


def cmd_cf(args) -> int:
    x = _parse_point(args.x)
    try:
        cf = continued_fraction(x, args.depth)
    except PrecisionExhausted as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    coeffs = ",".join(str(a) for a in cf.coefficients)
    note = " (terminates)" if cf.terminated else ""
    print(f"x = {args.x}")
    print(f"coefficients: [{coeffs}]{note}")
    print("k  a_k  p_k  q_k")
    for k, (a, (p, q)) in enumerate(zip(cf.coefficients, cf.convergents), start=1):
        print(f"{k}  {a}  {p}  {q}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(("k", "a_k", "p_k", "q_k"))
            for k, (a, (p, q)) in enumerate(zip(cf.coefficients, cf.convergents), start=1):
                writer.writerow((k, a, p, q))
    return EXIT_OK


def cmd_sum(args) -> int:
    x0 = _parse_point(args.x)
    alpha = _parse_point(args.alpha)
    spec = OrbitSpec(x0, alpha, args.T, _observable(args))
    stride = args.stride
    if stride is None:
        stride = 1 if args.T <= 10**6 else max(1, args.T // 10**6)
    series = ergodic_sum_series(spec, stride=stride)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = Path(args.out) if args.out else out_dir / f"sum_{args.alpha}_{args.T}.csv"
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("t", "S_t"))
        for t, s in zip(series.times, series.values):
            writer.writerow((int(t), repr(float(s))))
    print(f"wrote {out_path} ({len(series.times)} rows, stride {stride})")
    if args.plot:
        from . import plotting

        plot_path = Path(args.plot)
        plotting.save_series_trace(series.times, series.values, plot_path,
                                   title=f"alpha = {args.alpha}")
        print(f"wrote {plot_path}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except OSError as exc:
            print(f"cannot read config: {exc}", file=sys.stderr)
            return EXIT_IO
        if "config" in data:  # a manifest: replay its configuration
            data = data["config"]
        cfg = reporting.config_from_dict(data)
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = _resolve_seed(args.seed)
        if args.N is not None:
            overrides["N"] = args.N
        if args.T is not None:
            overrides["T"] = args.T
        if args.workers is not None:
            overrides["workers"] = args.workers
        if args.alpha is not None:
            overrides["alpha"] = _parse_point(args.alpha)
        if args.x is not None:
            overrides["x0"] = _parse_point(args.x)
        if args.t is not None:
            overrides["t_snapshot"] = args.t
        if args.obs is not None:
            overrides["observable"] = _observable(args)
        if overrides:
            from dataclasses import replace

            cfg = replace(cfg, **overrides)
    else:
        seed = _resolve_seed(args.seed)
        defaults = _experiment_defaults(args.kind)
        n = args.N if args.N is not None else defaults["N"]
        big_t = args.T if args.T is not None else defaults["T"]
        t_snapshot = args.t
        if args.kind == "density":
            if t_snapshot is None:
                raise SystemExit2("density experiment requires --t (the time slice)")
            big_t = t_snapshot  # the horizon is the slice itself
        alpha = _parse_point(args.alpha) if args.alpha else defaults.get("alpha")
        x0 = _parse_point(args.x) if args.x else defaults.get("x0")
        obs = _observable(args) if args.obs else defaults["observable"]
        cfg = ExperimentConfig(
            kind=args.kind, N=n, T=big_t, seed=seed, alpha=alpha, x0=x0,
            observable=obs, workers=args.workers, t_snapshot=t_snapshot,
            horizons=None, windows=args.windows,
        )
    written = []
    try:
        manifest, written = reporting.run_and_persist(
            cfg, args.out_dir, command="experiment " + cfg.kind, make_figure=args.plot)
    except (DegenerateSample, DegenerateNormalization, FitDiverged, ValueError) as exc:
        for path in written:
            Path(path).unlink(missing_ok=True)
        print(f"degenerate result: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except OSError as exc:
        for path in written:
            Path(path).unlink(missing_ok=True)
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(json.dumps(manifest.summary, indent=2, sort_keys=True))
    print(f"manifest: {written[-1]}")
    return EXIT_OK


def _experiment_defaults(kind: str) -> dict:
    saw = Observable.sawtooth()
    defaults = {
        "kesten": dict(N=100_000, T=1 << 20, observable=saw),
        "annealed-temporal": dict(N=100_000, T=1 << 20, observable=saw, x0=0.0),
        "temporal": dict(N=1, T=10**6, observable=Observable.indicator(0.5),
                         alpha=BUILTIN_POINTS["golden"], x0=0.0),
        "density": dict(N=10**6, T=2, observable=saw, alpha=BUILTIN_POINTS["e-2"]),
        "beck": dict(N=1, T=1 << 22, observable=Observable.indicator(0.5),
                     alpha=BUILTIN_POINTS["sqrt2-1"], x0=0.0),
        "probe": dict(N=1, T=1 << 20, observable=saw, alpha=BUILTIN_POINTS["pi-3"], x0=0.0),
        "tt": dict(N=100_000, T=1 << 18, observable=saw),
    }
    return defaults[kind]


def cmd_kesten_constant(args) -> int:
    seed = None
    if args.tau in ("estimated", "both"):
        seed = _resolve_seed(args.seed)
    rows = kesten_report(seed=seed, n_samples=args.samples, depth=args.depth,
                         K=args.K, panels=args.panels)
    if args.tau == "analytic":
        rows = [r for r in rows if r.tau_source == "analytic"]
    elif args.tau == "estimated":
        rows = [r for r in rows if r.tau_source == "estimated"]
    if args.I != "both":
        rows = [r for r in rows if r.I_method == args.I]
    if args.fmt == "json":
        payload = [
            {
                "tau_source": r.tau_source, "tau": r.tau, "tau_std_error": r.tau_std_error,
                "I_method": r.I_method, "I_value": r.I_value,
                "I_error_bound": r.I_error_bound, "rho": r.rho,
                "rho_relative_error_vs_4pi": r.rho_relative_error,
            }
            for r in rows
        ]
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"{'tau source':<10} {'tau':<12} {'I method':<12} {'I':<14} "
              f"{'I err bound':<12} {'rho':<14} {'rel err vs 4pi':<14}")
        for r in rows:
            print(f"{r.tau_source:<10} {r.tau:<12.8f} {r.I_method:<12} {r.I_value:<14.10f} "
                  f"{r.I_error_bound:<12.2e} {r.rho:<14.8f} {r.rho_relative_error:<+14.2e}")
    return EXIT_OK


def cmd_fit(args) -> int:
    try:
        data = np.loadtxt(args.samples_csv, delimiter=",", skiprows=args.skip_rows,
                          usecols=args.column, ndmin=1)
    except OSError as exc:
        print(f"cannot read samples: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        if args.family == "cauchy":
            fit = fit_cauchy(data)
            payload = {"family": "cauchy", "rho": fit.rho, "ks_distance": fit.ks_distance}
        elif args.family == "gaussian":
            fit = fit_gaussian(data)
            payload = {"family": "gaussian", "mu": fit.mu, "sigma": fit.sigma,
                       "ks_distance": fit.ks_distance}
        else:
            fit = fit_q_gaussian(data, q_min=args.q_min)
            payload = {"family": "q-gaussian", "q": fit.q, "beta": fit.beta,
                       "c_q": fit.c_q, "p_zero": fit.p_zero,
                       "log_likelihood": fit.log_likelihood}
    except (DegenerateSample, FitDiverged) as exc:
        print(f"degenerate result: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotsum",
        description="Ergodic sums of irrational circle rotations: continued "
                    "fractions, distributional-limit experiments, and Kesten's constant.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_cf = sub.add_parser("cf", help="continued-fraction expansion and convergents")
    p_cf.add_argument("x", help=f"builtin ({', '.join(sorted(BUILTIN_POINTS))}) or decimal")
    p_cf.add_argument("--depth", type=int, default=8)
    p_cf.add_argument("--csv", default=None, help="also write a CSV table")
    _add_common(p_cf, seeded=False)
    p_cf.set_defaults(func=cmd_cf)

    p_sum = sub.add_parser("sum", help="ergodic-sum series S_t as CSV (t, S_t)")
    p_sum.add_argument("--x", required=True)
    p_sum.add_argument("--alpha", required=True)
    p_sum.add_argument("--T", type=int, required=True)
    p_sum.add_argument("--obs", choices=("sawtooth", "indicator"), default="sawtooth")
    p_sum.add_argument("--gamma", type=float, default=0.5)
    p_sum.add_argument("--stride", type=int, default=None,
                       help="store every m-th value (default: auto above T=10^6)")
    p_sum.add_argument("--out", default=None, help="CSV path")
    p_sum.add_argument("--plot", default=None, help="write an SVG trace here")
    _add_common(p_sum, seeded=False)
    p_sum.set_defaults(func=cmd_sum)

    p_exp = sub.add_parser("experiment", help="run a distributional experiment")
    p_exp.add_argument("kind", choices=("kesten", "annealed-temporal", "temporal",
                                        "density", "beck", "probe", "tt"))
    p_exp.add_argument("--config", default=None,
                       help="JSON config or a previous manifest to replay")
    p_exp.add_argument("--N", type=int, default=None)
    p_exp.add_argument("--T", type=int, default=None)
    p_exp.add_argument("--alpha", default=None)
    p_exp.add_argument("--x", default=None)
    p_exp.add_argument("--obs", choices=("sawtooth", "indicator"), default=None)
    p_exp.add_argument("--gamma", type=float, default=0.5)
    p_exp.add_argument("--t", type=int, default=None, help="density: the fixed time slice")
    p_exp.add_argument("--windows", default="dyadic",
                       help="probe: 'dyadic' or 'convergents'")
    p_exp.add_argument("--plot", action="store_true", help="render the SVG figure")
    _add_common(p_exp, seeded=True)
    p_exp.set_defaults(func=cmd_experiment)

    p_kc = sub.add_parser("kesten-constant", help="table of I, tau, and rho")
    p_kc.add_argument("--tau", choices=("analytic", "estimated", "both"), default="both")
    p_kc.add_argument("--I", choices=("closed-form", "quadrature", "both"), default="both")
    p_kc.add_argument("--K", type=int, default=10_000, help="series truncation")
    p_kc.add_argument("--panels", type=int, default=256, help="quadrature panels per axis")
    p_kc.add_argument("--samples", type=int, default=10_000, help="Monte Carlo tau samples")
    p_kc.add_argument("--depth", type=int, default=30, help="Monte Carlo tau depth")
    _add_common(p_kc, seeded=True)
    p_kc.set_defaults(func=cmd_kesten_constant)

    p_fit = sub.add_parser("fit", help="fit a family to a CSV sample file")
    p_fit.add_argument("family", choices=("cauchy", "gaussian", "q-gaussian"))
    p_fit.add_argument("samples_csv")
    p_fit.add_argument("--column", type=int, default=0)
    p_fit.add_argument("--skip-rows", type=int, default=0)
    p_fit.add_argument("--q-min", type=float, default=1.0)
    _add_common(p_fit, seeded=False)
    p_fit.set_defaults(func=cmd_fit)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit2 as exc:
        parser.exit(EXIT_USAGE, f"error: {exc}\n")
    except (DegenerateSample, DegenerateNormalization, FitDiverged) as exc:
        print(f"degenerate result: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
