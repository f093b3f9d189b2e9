"""Command-line interface: bound evaluation, Monte Carlo runs, reference
table/figure data, and the recovery demo. Emits CSV (default) or JSON for
external plotting; no rendering happens here.

Exit codes: 0 success, 2 usage/validation error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from . import bounds, montecarlo, recovery
from .masks import MaskConfig, generate_mask, worst_case_mask

DEFAULT_SEED = 1729
SEED_ENV_VAR = "MASKSPECTRA_SEED"

_USAGE_ERROR = 2
_RUNTIME_ERROR = 3


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    return int(os.environ.get(SEED_ENV_VAR, DEFAULT_SEED))


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render(records: list[dict], columns, fmt: str) -> str:
    if fmt == "json":
        return montecarlo.records_to_json(records)
    return montecarlo.records_to_csv(records, columns)


def cmd_bounds(args) -> int:
    spec = bounds.BoundSpec(args.n, args.p, n_p=args.np, epsilon=args.eps, union_mode=args.union)
    report = bounds.bound_report(spec).to_dict()
    _emit(_render([report], list(report.keys()), args.format), args.out)
    return 0


def cmd_simulate(args) -> int:
    seed = _resolve_seed(args.seed)
    spec_b = bounds.BoundSpec(args.n, args.p, epsilon=args.eps)
    sigma3 = bounds.sigma_bound(args.n, args.p, 3)
    thresholds = (
        ("gaussian_T", bounds.gaussian_bound(spec_b)),
        ("sigma3", sigma3),
        ("sigma4", (4.0 / 3.0) * sigma3),
        ("worst_case", bounds.worst_case_bound(args.n, math.ceil(args.n * args.p))),
    )
    stats = montecarlo.run_experiment(
        montecarlo.ExperimentSpec(
            MaskConfig(args.n, args.p, seed), args.trials, thresholds=thresholds, workers=args.workers
        )
    )
    payload = {"N": args.n, "p": args.p, "seed": seed, **stats.to_dict()}
    if args.format == "json":
        _emit(montecarlo.records_to_json(payload), args.out)
        return 0
    flat = {
        "N": args.n,
        "p": args.p,
        "seed": seed,
        "trials": stats.trials,
        "max_mean": stats.per_trial_max.mean,
        "max_variance": stats.per_trial_max.variance,
        "max_min": stats.per_trial_max.min,
        "max_max": stats.per_trial_max.max,
        "global_max": stats.global_max,
        "mean_abs_coeff": stats.mean_abs_coeff,
        "n_p_mean": stats.n_p_stats.mean,
        "n_p_variance": stats.n_p_stats.variance,
    }
    for label, _ in thresholds:
        flat[f"exceed_{label}"] = stats.exceedance_counts[label]
    _emit(montecarlo.records_to_csv([flat]), args.out)
    return 0


def cmd_table1(args) -> int:
    seed = _resolve_seed(args.seed)
    large_n_trials = args.trials if args.full_scale else min(args.trials, 1000)
    records = montecarlo.table1_report(
        montecarlo.TABLE1_ROWS,
        trials=args.trials,
        seed=seed,
        large_n_trials=large_n_trials,
        workers=args.workers,
    )
    _emit(_render(records, montecarlo.TABLE1_COLUMNS, args.format), args.out)
    return 0


def cmd_figure(args) -> int:
    seed = _resolve_seed(args.seed)
    if args.mode == "bounds":
        ns = _parse_int_list(args.ns, "--ns")
        records = montecarlo.figure_curves(
            args.rate, ns, trials=args.trials, seed=seed, eps=args.eps, workers=args.workers
        )
        _emit(_render(records, montecarlo.FIGURE_COLUMNS, args.format), args.out)
        return 0
    if args.n is None:
        raise ValueError(f"--n is required for mode {args.mode!r}")
    if args.mode == "ratio":
        ps = _parse_float_list(args.ps, "--ps")
        curves = {
            p: montecarlo.noise_ratio_curve(MaskConfig(args.n, p, seed), args.trials, workers=args.workers)
            for p in ps
        }
        columns = ["k"] + [f"ratio_p{p:g}" for p in ps]
        records = [
            {"k": k, **{f"ratio_p{p:g}": float(curves[p][k - 1]) for p in ps}}
            for k in range(1, args.n)
        ]
        _emit(_render(records, columns, args.format), args.out)
        return 0
    if args.mode == "approx":
        records = []
        for i in range(1, 100):
            p = i / 100.0
            n_p = math.ceil(args.n * p)
            records.append(
                {
                    "p": p,
                    "n_p": n_p,
                    "exact_ratio": bounds.worst_case_bound(args.n, n_p) / n_p,
                    "approx_ratio": bounds.ratio_approximation(args.n, p),
                }
            )
        _emit(_render(records, ("p", "n_p", "exact_ratio", "approx_ratio"), args.format), args.out)
        return 0
    raise ValueError(f"unknown figure mode {args.mode!r}")


def cmd_recover(args) -> int:
    seed = _resolve_seed(args.seed)
    signal_path = args.signal if args.signal else recovery.demo_signal_path()
    if not os.path.exists(signal_path):
        raise ValueError(f"signal fixture not found: {signal_path}")
    x = recovery.read_signal_csv(signal_path)
    n = int(x.size)
    if args.rate >= 1.0:
        mask = worst_case_mask(n, n)  # full sampling
    else:
        mask = generate_mask(MaskConfig(n, args.rate, seed), 0)
    xs = recovery.sample_random(x, mask)
    spec = recovery.RecoverySpec(mask=mask, iterations=args.iters, t0=args.t0, alpha=args.alpha)
    estimate, history = recovery.recover(xs, spec, reference=x)
    csv_text = recovery.history_to_csv(history)
    final_snr = history[-1][2]
    summary = (
        f"recover: n={n} rate={args.rate:g} n_p={mask.n_p} seed={seed} "
        f"iterations={len(history)} final_snr_db={final_snr:.3f}\n"
    )
    if args.out:
        _emit(csv_text, args.out)
        sys.stdout.write(summary)
    else:
        sys.stdout.write(csv_text)
        sys.stderr.write(summary)
    return 0


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part]
    except ValueError as exc:
        raise ValueError(f"{flag} expects comma-separated integers, got {text!r}") from exc
    if not values:
        raise ValueError(f"{flag} must list at least one value")
    return values


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part]
    except ValueError as exc:
        raise ValueError(f"{flag} expects comma-separated numbers, got {text!r}") from exc
    if not values:
        raise ValueError(f"{flag} must list at least one value")
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maskspectra",
        description="Bounds and Monte Carlo validation for the peak DFT magnitude of Bernoulli sampling masks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p_bounds = sub.add_parser("bounds", help="evaluate every bound family for one (N, p, eps)")
    p_bounds.add_argument("--n", type=int, required=True, help="mask length N")
    p_bounds.add_argument("--p", type=float, required=True, help="sampling rate in (0,1)")
    p_bounds.add_argument("--eps", type=float, default=1e-4, help="tail probability budget")
    p_bounds.add_argument("--np", type=int, default=None, help="support size (default ceil(N*p))")
    p_bounds.add_argument("--union", action="store_true", help="split eps over the N-1 bins")
    add_common(p_bounds)
    p_bounds.set_defaults(func=cmd_bounds)

    p_sim = sub.add_parser("simulate", help="Monte Carlo trial statistics for one (N, p)")
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--p", type=float, required=True)
    p_sim.add_argument("--trials", type=int, default=10000)
    p_sim.add_argument("--eps", type=float, default=1e-4)
    p_sim.add_argument("--seed", type=int, default=None, help=f"RNG seed (default ${SEED_ENV_VAR} or {DEFAULT_SEED})")
    p_sim.add_argument("--workers", type=int, default=1)
    add_common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_table = sub.add_parser("table1", help="simulated maxima vs worst-case bound for the reference grid")
    p_table.add_argument("--trials", type=int, default=10000)
    p_table.add_argument("--seed", type=int, default=None)
    p_table.add_argument("--workers", type=int, default=1)
    p_table.add_argument(
        "--full-scale",
        action="store_true",
        help="run N=131071 rows at the full trial count (long; default caps them at 1000)",
    )
    add_common(p_table)
    p_table.set_defaults(func=cmd_table1)

    p_fig = sub.add_parser("figure", help="bound/simulation curves for external plotting")
    p_fig.add_argument("--mode", choices=("bounds", "ratio", "approx"), default="bounds")
    p_fig.add_argument("--rate", type=float, default=0.5, help="sampling rate (bounds mode)")
    p_fig.add_argument("--ns", default="127,1543,8191", help="comma-separated N list (bounds mode)")
    p_fig.add_argument("--n", type=int, default=None, help="mask length (ratio/approx modes)")
    p_fig.add_argument("--ps", default="0.1,0.2,0.5,0.8", help="comma-separated rates (ratio mode)")
    p_fig.add_argument("--eps", type=float, default=1e-4)
    p_fig.add_argument("--trials", type=int, default=1000)
    p_fig.add_argument("--seed", type=int, default=None)
    p_fig.add_argument("--workers", type=int, default=1)
    add_common(p_fig)
    p_fig.set_defaults(func=cmd_figure)

    p_rec = sub.add_parser("recover", help="iterative-thresholding recovery demo on a band-limited fixture")
    p_rec.add_argument("--signal", default=None, help="signal fixture CSV (default: bundled demo)")
    p_rec.add_argument("--rate", type=float, default=0.5, help="sampling rate; 1 keeps every sample")
    p_rec.add_argument("--seed", type=int, default=None)
    p_rec.add_argument("--iters", type=int, default=50)
    p_rec.add_argument("--alpha", type=float, default=0.1, help="threshold decay rate per iteration")
    p_rec.add_argument("--t0", type=float, default=None, help="initial threshold (default: bound-derived)")
    p_rec.add_argument("--out", default=None, help="history CSV file (default: stdout)")
    p_rec.set_defaults(func=cmd_recover)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _USAGE_ERROR
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime failure: {exc}", file=sys.stderr)
        return _RUNTIME_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
