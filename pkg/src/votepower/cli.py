"""Command-line interface.

One subcommand per task; results go to stdout or --output as CSV (default)
or JSON.  Floats are serialized with 17 significant digits so files
round-trip losslessly, and nothing time- or host-dependent is written, so
repeating a command reproduces the output byte for byte.

Exit codes: 0 success, 2 usage error, 3 numeric convergence failure,
4 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import analytic, experiments, games, simplex, weightdist
from .errors import (
    BudgetExceededError,
    ConvergenceFailureError,
    VotePowerError,
)
from .svgplot import emit_plot

_CURVE_HEADER = ("quota", "series-name", "mean", "standard-error", "samples")


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _write_table(args, header, rows):
    if args.format == "json":
        payload = [dict(zip(header, row)) for row in rows]
        text = json.dumps(payload, indent=2) + "\n"
    else:
        lines = [",".join(header)]
        lines.extend(",".join(_fmt(cell) for cell in row) for row in rows)
        text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _parse_floats(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip() != ""]


def _parse_ints(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip() != ""]


def _parse_fraction(text: str) -> tuple[int, int]:
    frac = Fraction(text)
    return frac.numerator, frac.denominator


def _weights_from_args(args) -> np.ndarray:
    if getattr(args, "weights_csv", None):
        values = np.loadtxt(args.weights_csv, delimiter=",", ndmin=1)
        return simplex.as_weight_vector(values, normalize=True)
    if getattr(args, "weights", None):
        return simplex.as_weight_vector(_parse_floats(args.weights), normalize=True)
    raise argparse.ArgumentTypeError("no weights given")


def _game_from_args(args) -> games.VotingGame:
    if getattr(args, "weights_int", None):
        if not getattr(args, "quota_frac", None):
            raise argparse.ArgumentTypeError("--weights-int requires --quota-frac")
        num, den = _parse_fraction(args.quota_frac)
        return games.VotingGame.from_integers(_parse_ints(args.weights_int), num, den)
    if args.quota is None:
        raise argparse.ArgumentTypeError("a quota is required")
    return games.VotingGame(_weights_from_args(args), args.quota)


def _quota_grid_from_args(args) -> np.ndarray:
    if getattr(args, "quotas", None):
        return np.array(_parse_floats(args.quotas))
    return experiments.default_quota_grid()


def _maybe_plot(args, series, caption):
    if getattr(args, "plot", None):
        emit_plot(series, args.plot, caption)


def _step_series(curve: games.StepCurve):
    """Staircase (x, y) arrays per series from a piecewise-constant curve."""
    bps = curve.breakpoints
    lefts = np.concatenate(([0.5], bps[:-1]))
    xs = np.column_stack([lefts, bps]).reshape(-1)
    values = np.atleast_2d(np.asarray(curve.values).T)
    out = []
    for p in range(values.shape[0]):
        ys = np.repeat(values[p], 2)
        name = (
            curve.statistic
            if values.shape[0] == 1
            else f"{curve.statistic}_player_{p + 1}"
        )
        out.append((name, xs, ys))
    return out


# --------------------------------------------------------------------------
# subcommands

def _cmd_sample_weights(args):
    draws = simplex.sample_uniform_simplex_batch(
        args.n, args.samples, simplex.RandomSeed(args.seed, args.stream)
    )
    header = tuple(f"w{i + 1}" for i in range(args.n))
    _write_table(args, header, [tuple(float(x) for x in row) for row in draws])
    return 0


def _cmd_expected_weights(args):
    rows = [
        (k, weightdist.expected_ordered_weight(args.n, k))
        for k in range(1, args.n + 1)
    ]
    _write_table(args, ("k", "expected"), rows)
    return 0


def _cmd_weight_density(args):
    lo, hi = weightdist.ordered_weight_support(args.n, args.k)
    xs = np.linspace(lo, hi, args.points)
    rows = [(float(x), weightdist.ordered_weight_density(args.n, args.k, float(x))) for x in xs]
    _write_table(args, ("x", "density"), rows)
    _maybe_plot(
        args,
        [(f"f_{args.n},{args.k}", xs, np.array([r[1] for r in rows]))],
        f"ordered-weight density, n={args.n} k={args.k}",
    )
    return 0


def _cmd_moments(args):
    rows = []
    if args.m:
        exponents = _parse_ints(args.m)
        rows.append(("product_moment", weightdist.product_moment(args.n, exponents)))
    if args.power_sum is not None:
        rows.append(("power_sum_moment", weightdist.power_sum_moment(args.n, args.power_sum)))
    if args.sum_sq:
        mean, var = weightdist.sum_sq_stats(args.n)
        rows.append(("sum_sq_mean", mean))
        rows.append(("sum_sq_variance", var))
    if not rows:
        raise argparse.ArgumentTypeError("pick at least one of --m, --power-sum, --sum-sq")
    _write_table(args, ("quantity", "value"), rows)
    return 0


def _cmd_indices(args):
    game = _game_from_args(args)
    profile = games.banzhaf(game)
    idle = sorted(i + 1 for i in games.dummies(game))
    printed = games.optimal_quota_diagnostic(game.weights, "printed")
    payload = {
        "n": game.n,
        "quota": game.quota,
        "psi": [float(x) for x in profile.psi],
        "beta": [float(x) for x in profile.beta],
        "coleman": profile.coleman,
        "winning_count": profile.winning_count,
        "member_counts": [int(x) for x in profile.member_counts],
        "dummies": idle,
        "hoeffding_bound": games.hoeffding_bound(game),
        "optimal_quota_sqrt": games.optimal_quota_diagnostic(game.weights, "sqrt"),
        "optimal_quota_printed": printed,
        "optimal_quota_printed_exceeds_one": printed > 1.0,
    }
    if args.format == "csv":
        rows = [
            (i + 1, float(profile.psi[i]), float(profile.beta[i]), int(profile.member_counts[i]))
            for i in range(game.n)
        ]
        _write_table(args, ("player", "psi", "beta", "member-count"), rows)
    else:
        text = json.dumps(payload, indent=2) + "\n"
        if args.output:
            with open(args.output, "w", encoding="utf-8") as handle:
                handle.write(text)
        else:
            sys.stdout.write(text)
    return 0


def _cmd_fixed_curve(args):
    weights = _weights_from_args(args)
    curve = games.fixed_weight_quota_curve(weights, args.functional)
    _write_table(args, _CURVE_HEADER, curve.to_rows())
    _maybe_plot(
        args,
        _step_series(curve),
        f"fixed-weight {args.functional} vs quota, n={weights.size}",
    )
    return 0


def _cmd_power_curve(args):
    grid = _quota_grid_from_args(args)
    curves = experiments.mc_power_curve(
        args.n,
        grid,
        samples=args.samples,
        seed=simplex.RandomSeed(args.seed, args.stream),
        statistic=args.statistic,
        workers=args.workers,
    )
    rows = [row for curve in curves for row in curve.to_rows()]
    _write_table(args, _CURVE_HEADER, rows)
    _maybe_plot(
        args,
        [(c.name, c.quotas, c.mean) for c in curves],
        f"mean ordered {args.statistic}, n={args.n} seed={args.seed} samples={args.samples}",
    )
    return 0


def _cmd_coleman_curve(args):
    if args.quota is not None:
        grid = np.array([args.quota])
    else:
        grid = _quota_grid_from_args(args)
    if args.method == "inversion":
        values = [
            analytic.expected_coleman(
                args.n,
                float(q),
                integration_tolerance=args.tolerance,
                max_frequency=args.max_frequency,
            )
            for q in grid
        ]
        rows = [(float(q), "coleman", v, 0.0, 0) for q, v in zip(grid, values)]
        curves = [("coleman_inversion", grid, np.array(values))]
    elif args.method == "normal":
        values = [analytic.expected_coleman_normal(args.n, float(q)) for q in grid]
        rows = [(float(q), "coleman_normal", v, 0.0, 0) for q, v in zip(grid, values)]
        curves = [("coleman_normal", grid, np.array(values))]
    elif args.method == "mc":
        curve = experiments.mc_coleman_curve(
            args.n,
            grid,
            samples=args.samples,
            seed=simplex.RandomSeed(args.seed, args.stream),
            workers=args.workers,
        )
        rows = curve.to_rows()
        curves = [("coleman_mc", curve.quotas, curve.mean)]
        values = list(curve.mean)
    elif args.method == "hoeffding-bound":
        curve = experiments.mc_hoeffding_curve(
            args.n,
            grid,
            samples=args.samples,
            seed=simplex.RandomSeed(args.seed, args.stream),
            workers=args.workers,
        )
        rows = curve.to_rows()
        curves = [("hoeffding_bound", curve.quotas, curve.mean)]
        values = list(curve.mean)
    else:
        raise argparse.ArgumentTypeError(f"unknown method {args.method!r}")
    if args.quota is not None and not args.output and args.format == "csv":
        sys.stdout.write(_fmt(float(values[0])) + "\n")
    else:
        _write_table(args, _CURVE_HEADER, rows)
    caption = f"expected Coleman index, n={args.n} method={args.method}"
    if args.method in ("mc", "hoeffding-bound"):
        caption += f" seed={args.seed} samples={args.samples}"
    _maybe_plot(args, curves, caption)
    return 0


def _cmd_classes(args):
    catalog = experiments.discover_classes(
        args.n, budget=args.budget, seed=simplex.RandomSeed(args.seed, args.stream)
    )
    rows = [
        (idx, ";".join(_fmt(b) for b in cls.beta), cls.hits)
        for idx, cls in enumerate(catalog.classes)
    ]
    _write_table(args, ("class-id", "beta-vector", "hit-count"), rows)
    return 0


def _cmd_spline_fit(args):
    quotas, values = _read_series_csv(args.input, args.series)
    knots = "auto" if args.breakpoints == "auto" else _parse_floats(args.breakpoints)
    fit = experiments.fit_spline(
        quotas,
        values,
        max_degree=args.max_degree,
        breakpoints=knots,
        penalty=args.penalty,
    )
    payload = {
        "series": args.series,
        "degree": fit.degree,
        "interior_breakpoints": list(fit.interior_breakpoints),
        "piece_coefficients": [list(p) for p in fit.piece_coefficients],
        "max_residual": fit.max_residual,
    }
    text = json.dumps(payload, indent=2) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _read_series_csv(path: str, series: str | None):
    quotas, values = [], []
    with open(path, "r", encoding="utf-8") as handle:
        header = handle.readline().strip().split(",")
        try:
            qcol, scol, mcol = (
                header.index("quota"),
                header.index("series-name"),
                header.index("mean"),
            )
        except ValueError as exc:
            raise VotePowerError(f"{path} is not a curve CSV") from exc
        for line in handle:
            parts = line.strip().split(",")
            if len(parts) <= max(qcol, scol, mcol):
                continue
            if series is None:
                series = parts[scol]  # default: whichever series comes first
            if parts[scol] == series:
                quotas.append(float(parts[qcol]))
                values.append(float(parts[mcol]))
    if not quotas:
        raise VotePowerError(f"series {series!r} not found in {path}")
    order = np.argsort(quotas)
    return np.array(quotas)[order], np.array(values)[order]


def _cmd_analytic(args):
    what = args.what
    if what == "beta-n2":
        grid = _quota_grid_from_args(args)
        rows = []
        for q in grid:
            b1, b2 = analytic.expected_beta_n2(float(q))
            rows.append((float(q), "beta_rank_1", b1, 0.0, 0))
            rows.append((float(q), "beta_rank_2", b2, 0.0, 0))
        _write_table(args, _CURVE_HEADER, rows)
    elif what == "beta-n3":
        grid = _quota_grid_from_args(args)
        rows = []
        for q in grid:
            triple = analytic.expected_beta_n3(float(q))
            for k, value in enumerate(triple, start=1):
                rows.append((float(q), f"beta_rank_{k}", value, 0.0, 0))
        _write_table(args, _CURVE_HEADER, rows)
    elif what == "class-probs":
        grid = _quota_grid_from_args(args)
        table = analytic.class_table_n3()
        rows = []
        for q in grid:
            for label, prob in table.probabilities(float(q)).items():
                rows.append((float(q), f"class_{label}", prob, 0.0, 0))
        _write_table(args, _CURVE_HEADER, rows)
    elif what == "extrema":
        rows = [
            (e.rank, _fmt(float(e.location)), str(e.location), e.kind)
            for e in analytic.extrema_n3()
        ]
        _write_table(args, ("rank", "quota", "quota-exact", "kind"), rows)
    elif what == "cf":
        ts = np.array(_parse_floats(args.t)) if args.t else np.linspace(0.0, 20.0, 81)
        values = analytic.coalition_weight_cf(args.n, ts)
        _write_table(args, ("t", "value"), list(zip(map(float, ts), map(float, values))))
    else:
        raise argparse.ArgumentTypeError(f"unknown analytic target {what!r}")
    return 0


# --------------------------------------------------------------------------
# parser

def _add_output_args(sub):
    sub.add_argument("--output", help="write to this path instead of stdout")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_seed_args(sub):
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--stream", type=int, default=0)


def _add_weight_args(sub, exact: bool = False):
    sub.add_argument("--weights", help="comma-separated weights (normalized by their sum)")
    sub.add_argument("--weights-csv", help="CSV file with one weight per value")
    if exact:
        sub.add_argument("--weights-int", help="comma-separated integer weights (exact mode)")
        sub.add_argument("--quota-frac", help="quota as a fraction of total weight, e.g. 11/20")


def build_parser(defaults: dict | None = None) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="votepower",
        description="Voting-power computations for weighted voting games "
        "with fixed or simplex-uniform random weights.",
    )
    parser.add_argument("--config", help="key=value file overriding option defaults")
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("sample-weights", help="draw uniform weight vectors")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--samples", type=int, default=10)
    _add_seed_args(sub)
    _add_output_args(sub)
    sub.set_defaults(func=_cmd_sample_weights)

    sub = commands.add_parser("expected-weights", help="expected ordered weights")
    sub.add_argument("--n", type=int, required=True)
    _add_output_args(sub)
    sub.set_defaults(func=_cmd_expected_weights)

    sub = commands.add_parser("weight-density", help="density of the k-th largest weight")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--k", type=int, required=True)
    sub.add_argument("--points", type=int, default=512)
    sub.add_argument("--plot", help="also write an SVG chart here")
    _add_output_args(sub)
    sub.set_defaults(func=_cmd_weight_density)

    sub = commands.add_parser("moments", help="weight product and power-sum moments")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--m", help="comma-separated exponent vector")
    sub.add_argument("--power-sum", type=int, help="power-sum moment order m")
    sub.add_argument("--sum-sq", action="store_true", help="mean and variance of sum of squares")
    _add_output_args(sub)
    sub.set_defaults(func=_cmd_moments)

    sub = commands.add_parser("indices", help="exact power indices of one game")
    _add_weight_args(sub, exact=True)
    sub.add_argument("--quota", type=float)
    _add_output_args(sub)
    sub.set_defaults(func=_cmd_indices, format="json")

    sub = commands.add_parser("fixed-curve", help="exact quota step-curve for fixed weights")
    _add_weight_args(sub)
    sub.add_argument("--functional", choices=("beta", "psi", "coleman"), default="beta")
    sub.add_argument("--plot")
    _add_output_args(sub)
    sub.set_defaults(func=_cmd_fixed_curve)

    sub = commands.add_parser("power-curve", help="Monte Carlo mean ordered indices vs quota")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--samples", type=int, default=65536)
    sub.add_argument("--statistic", choices=("beta", "psi"), default="beta")
    sub.add_argument("--quotas", help="comma-separated quota grid")
    sub.add_argument("--workers", type=int, default=None)
    sub.add_argument("--plot")
    _add_seed_args(sub)
    _add_output_args(sub)
    sub.set_defaults(func=_cmd_power_curve)

    sub = commands.add_parser("coleman-curve", help="expected Coleman index vs quota")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument(
        "--method",
        choices=("inversion", "normal", "mc", "hoeffding-bound"),
        default="inversion",
    )
    sub.add_argument("--quota", type=float, help="single quota; prints one value")
    sub.add_argument("--quotas", help="comma-separated quota grid")
    sub.add_argument("--samples", type=int, default=65536)
    sub.add_argument("--tolerance", type=float, default=1e-7)
    sub.add_argument("--max-frequency", type=float, default=2.0 ** 22)
    sub.add_argument("--workers", type=int, default=None)
    sub.add_argument("--plot")
    _add_seed_args(sub)
    _add_output_args(sub)
    sub.set_defaults(func=_cmd_coleman_curve)

    sub = commands.add_parser("classes", help="discover game classes by sampling")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--budget", type=int, default=10 ** 6)
    _add_seed_args(sub)
    _add_output_args(sub)
    sub.set_defaults(func=_cmd_classes)

    sub = commands.add_parser("spline-fit", help="piecewise-polynomial fit of a curve CSV")
    sub.add_argument("--input", required=True)
    sub.add_argument("--series", help="series-name to fit (default: first)")
    sub.add_argument("--max-degree", type=int, required=True)
    sub.add_argument("--breakpoints", default="auto")
    sub.add_argument("--penalty", type=float, default=1e-8)
    sub.add_argument("--output")
    sub.set_defaults(func=_cmd_spline_fit, format="json")

    sub = commands.add_parser("analytic", help="closed-form small-n curves and extrema")
    sub.add_argument(
        "--what",
        choices=("beta-n2", "beta-n3", "class-probs", "extrema", "cf"),
        required=True,
    )
    sub.add_argument("--n", type=int, default=3)
    sub.add_argument("--quotas", help="comma-separated quota grid")
    sub.add_argument("--t", help="comma-separated CF arguments")
    _add_output_args(sub)
    sub.set_defaults(func=_cmd_analytic)

    if defaults:
        # Subparsers re-apply their own defaults over the parent namespace,
        # so config overrides must reach every subparser as well.
        parser.set_defaults(**defaults)
        for sub in commands.choices.values():
            sub.set_defaults(**defaults)
    return parser


def _load_config(path: str) -> dict:
    out = {}
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line or line.startswith("#") or "=" not in line:
                continue
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            value = value.strip()
            for cast in (int, float):
                try:
                    value = cast(value)
                    break
                except ValueError:
                    continue
            out[key] = value
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    defaults = {}
    if "--config" in argv:
        try:
            defaults = _load_config(argv[argv.index("--config") + 1])
        except (IndexError, OSError) as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return 2
    parser = build_parser(defaults)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "workers", None) is None:
        args.workers = int(os.environ.get("VOTEPOWER_WORKERS", "1"))
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4
    except ConvergenceFailureError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except (VotePowerError, argparse.ArgumentTypeError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
