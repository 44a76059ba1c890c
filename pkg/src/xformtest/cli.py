"""Command-line front end.

Subcommands:

- ``test-case1``: test equality of the two transformations when the
  reference distributions are known (standard normal or a quantile table).
- ``test-case2``: same test when the references are only available through
  training samples.
- ``simulate``: seeded level/power studies over the built-in scenario tables.
- ``analyze``: grid estimation, OLS linearization, parametric benchmark and
  moment-prediction comparison for paired before/after data.

Exit codes: 0 success (even when the null is rejected), 2 unusable inputs or
flags, 3 degenerate evaluation point, 4 non-overlapping reference ranges.

Every file-producing invocation also writes ``<prefix>.manifest.json`` with
the resolved flags, seed, library version, input digests and timestamps.
Numeric outputs depend only on inputs and seed, byte for byte; timing lives
in the manifest only.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import hashlib
import os
import sys
import time

import numpy as np

from . import __version__
from .analysis import (
    NoOverlapError,
    build_grid,
    density_curve,
    describe,
    ols_fit,
    parametric_affine,
    predict_moments,
)
from .distributions import normal_sample, substream
from .empirical import KnownCdf, sort_sample
from .kde import SmoothingSchedule
from .montecarlo import (
    DEFAULT_BETAS,
    DEFAULT_SIZES,
    SIMULATION_SCHEDULE,
    ScenarioConfig,
    TransformSpec,
    derive_seed,
    report_to_csv,
    report_to_json_dict,
    run_scenario,
    run_table1,
    run_table3,
    run_table4,
)
from .serialize import dump_json, dumps_json
from .svgplot import line_plot_svg
from .testing import Case1Inputs, Case2Inputs, DegeneratePointError, t1_statistic, t2_statistic

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DEGENERATE = 3
EXIT_NO_OVERLAP = 4

_MAX_POINT_DRAWS = 100


class InputError(Exception):
    """File or flag contents that cannot be used (exit code 2)."""


# --- input handling --------------------------------------------------------------


def _utc_now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).replace(microsecond=0).isoformat()


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def read_column(path: str, column: str | None = None) -> np.ndarray:
    """Read one numeric column from a file.

    CSV with a header row by default; a file whose first non-blank line is a
    bare number is treated as headerless, one value per line.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InputError(f"{path}: file holds no data")
    try:
        float(lines[0].strip())
        headerless = True
    except ValueError:
        headerless = False

    if headerless:
        try:
            values = [float(ln.strip()) for ln in lines]
        except ValueError as exc:
            raise InputError(f"{path}: {exc}") from exc
    else:
        rows = list(csv.DictReader(lines))
        if not rows:
            raise InputError(f"{path}: no rows under the header")
        names = list(rows[0].keys())
        name = column or names[0]
        if name not in names:
            raise InputError(f"{path}: no column {name!r}; available: {names}")
        try:
            values = [float(r[name]) for r in rows]
        except (TypeError, ValueError) as exc:
            raise InputError(f"{path}: column {name!r}: {exc}") from exc
    arr = np.asarray(values, dtype=float)
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        raise InputError(f"{path}: needs nonempty, finite numeric data")
    return arr


def _load_reference(spec: str, column: str | None) -> KnownCdf:
    if spec == "normal":
        return KnownCdf.standard_normal()
    # quantile table: two columns x,p spanning the full probability range
    try:
        with open(spec, "r", encoding="utf-8") as fh:
            rows = list(csv.reader(ln for ln in fh if ln.strip()))
    except OSError as exc:
        raise InputError(f"cannot read reference table {spec}: {exc}") from exc
    if not rows:
        raise InputError(f"{spec}: empty reference table")
    start = 0
    try:
        float(rows[0][0])
    except (ValueError, IndexError):
        start = 1
    try:
        xs = [float(r[0]) for r in rows[start:]]
        ps = [float(r[1]) for r in rows[start:]]
    except (ValueError, IndexError) as exc:
        raise InputError(f"{spec}: expected two numeric columns x,p: {exc}") from exc
    try:
        return KnownCdf.from_table(xs, ps)
    except ValueError as exc:
        raise InputError(f"{spec}: {exc}") from exc


def _schedule_from_args(args) -> SmoothingSchedule:
    try:
        schedule = SmoothingSchedule(c1=args.c1, c2=args.c2, k=args.k)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if not schedule.exponents_valid:
        sys.stderr.write(
            f"note: exponents c1={args.c1}, c2={args.c2} violate the "
            f"chi-squared-limit condition c2/k < c1 < 1/(1+2k) for k={args.k}; "
            "proceeding anyway\n"
        )
    return schedule


def _resolve_point(args, evaluate):
    """Return the evaluation result at --y, redrawing random points that
    land where the variance degenerates."""
    if args.y != "random":
        try:
            point = float(args.y)
        except ValueError as exc:
            raise InputError(f"--y must be a number or 'random', got {args.y!r}") from exc
        return point, evaluate(point), 0
    rng = substream(derive_seed(args.seed, "evaluation-point"))
    retries = 0
    for _ in range(_MAX_POINT_DRAWS):
        point = float(normal_sample(rng))
        try:
            return point, evaluate(point), retries
        except DegeneratePointError:
            retries += 1
    raise DegeneratePointError(f"{_MAX_POINT_DRAWS} random evaluation points were degenerate")


class _Manifest:
    def __init__(self, argv: list[str], args, inputs: list[str]):
        self.data = {
            "command": " ".join(argv),
            "subcommand": args.command,
            "flags": {
                k: v for k, v in sorted(vars(args).items())
                if k not in ("command", "func") and v is not None
            },
            "seed": getattr(args, "seed", None),
            "library_version": __version__,
            "input_digests": {path: _sha256(path) for path in inputs},
            "started_utc": _utc_now(),
        }
        self._t0 = time.perf_counter()

    def write(self, prefix: str) -> None:
        self.data["finished_utc"] = _utc_now()
        self.data["wall_clock_seconds"] = time.perf_counter() - self._t0
        dump_json(f"{prefix}.manifest.json", self.data)


# --- test commands ------------------------------------------------------------------


def _emit_test_result(args, manifest, payload: dict) -> int:
    text = dumps_json(payload)
    sys.stdout.write(text)
    if args.out:
        with open(f"{args.out}.json", "w", encoding="utf-8") as fh:
            fh.write(text)
        manifest.write(args.out)
    return EXIT_OK


def cmd_test_case1(args, argv) -> int:
    manifest = _Manifest(argv, args, [args.x, args.xtilde])
    x = read_column(args.x, args.column)
    xt = read_column(args.xtilde, args.column)
    if x.size < 2 or xt.size < 2:
        raise InputError("both observed samples need at least 2 values")
    ref = _load_reference(args.ref, args.column)
    ref_tilde = _load_reference(args.ref_tilde, args.column) if args.ref_tilde else ref
    schedule = _schedule_from_args(args)
    x_s, xt_s = sort_sample(x), sort_sample(xt)

    def evaluate(point: float):
        return t1_statistic(
            Case1Inputs(x_s, xt_s, ref, ref_tilde, schedule, point), alpha=args.alpha
        )

    point, res, retries = _resolve_point(args, evaluate)
    payload = {
        "case": "case1",
        "y": point,
        "g_hat": res.g_hat,
        "g_tilde_hat": res.g_tilde_hat,
        "sigma2_hat": res.sigma2_hat,
        "statistic": res.statistic,
        "p_value": res.p_value,
        "reject": res.reject,
        "alpha": res.alpha,
        "n": x_s.n,
        "n_tilde": xt_s.n,
        "effective_m": res.effective_m,
        "point_retries": retries,
    }
    return _emit_test_result(args, manifest, payload)


def cmd_test_case2(args, argv) -> int:
    manifest = _Manifest(argv, args, [args.x, args.y_file, args.xtilde, args.ytilde])
    x = read_column(args.x, args.column)
    y = read_column(args.y_file, args.column)
    xt = read_column(args.xtilde, args.column)
    yt = read_column(args.ytilde, args.column)
    schedule = _schedule_from_args(args)
    inputs_proto = [sort_sample(v) for v in (x, xt, y, yt)]

    def evaluate(point: float):
        return t2_statistic(
            Case2Inputs(*inputs_proto, schedule, point), alpha=args.alpha
        )

    point, res, retries = _resolve_point(args, evaluate)
    payload = {
        "case": "case2",
        "y": point,
        "g_hat": res.g_hat,
        "g_tilde_hat": res.g_tilde_hat,
        "sigma2_hat": res.sigma2_hat,
        "statistic": res.statistic,
        "p_value": res.p_value,
        "reject": res.reject,
        "alpha": res.alpha,
        "n": inputs_proto[0].n,
        "n_tilde": inputs_proto[1].n,
        "n_y": inputs_proto[2].n,
        "n_y_tilde": inputs_proto[3].n,
        "effective_m": res.effective_m,
        "point_retries": retries,
    }
    return _emit_test_result(args, manifest, payload)


# --- simulate -------------------------------------------------------------------------


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise InputError(f"bad numeric list {text!r}") from exc


def _parse_sizes(text: str) -> tuple[int, ...]:
    sizes = _parse_floats(text)
    if any(s != int(s) or s < 2 for s in sizes):
        raise InputError(f"sizes must be integers >= 2, got {text!r}")
    return tuple(int(s) for s in sizes)


def cmd_simulate(args, argv) -> int:
    manifest = _Manifest(argv, args, [])
    schedule = _schedule_from_args(args)
    sizes = _parse_sizes(args.sizes)
    threads = args.threads

    if args.table == "1":
        report = run_table1(args.seed, args.reps, sizes, args.alpha, schedule, threads)
    elif args.table == "3":
        report = run_table3(
            args.seed, args.reps, sizes, alpha=args.alpha, schedule=schedule, threads=threads
        )
    elif args.table == "4":
        betas = _parse_floats(args.betas)
        report = run_table4(
            args.seed, args.reps, sizes, betas, args.alpha, schedule, threads
        )
    else:
        report = _run_custom(args, schedule, sizes, threads)

    csv_text = report_to_csv(report)
    with open(f"{args.out}.csv", "w", encoding="utf-8") as fh:
        fh.write(csv_text)
    dump_json(f"{args.out}.json", report_to_json_dict(report))
    manifest.write(args.out)

    sys.stdout.write("case statistic alternative           n     beta  reject_pct retries\n")
    for r in report.rows:
        beta = "" if r.beta is None else f"{r.beta:g}"
        sys.stdout.write(
            f"{r.case:5s} {r.statistic:9s} {r.alternative:21s} {r.n:5d} {beta:>8s} "
            f"{r.reject_pct:10.6g} {r.retries:7d}\n"
        )
    return EXIT_OK


def _run_custom(args, schedule, sizes, threads):
    from .montecarlo import ReportRow, SimulationReport

    if args.alternative == "local_shift" and args.beta is None:
        raise InputError("--alternative local_shift needs --beta")
    g = TransformSpec("null_exp")
    g_tilde = TransformSpec(args.alternative, beta=args.beta)
    rows = []
    started = time.perf_counter()
    for n in sizes:
        seed = derive_seed(args.seed, args.case, g_tilde.label(), n)
        cfg = ScenarioConfig(
            case=args.case, g=g, g_tilde=g_tilde, n=n,
            replications=args.reps, alpha=args.alpha, seed=seed, schedule=schedule,
        )
        result = run_scenario(cfg, threads=threads)
        rows.append(
            ReportRow(
                case=cfg.case, statistic=cfg.statistic, alternative=g_tilde.label(),
                n=n, beta=args.beta if args.alternative == "local_shift" else None,
                replications=args.reps, reject_pct=result.reject_pct,
                retries=result.retries, seed=seed,
            )
        )
    return SimulationReport(
        table="custom", master_seed=args.seed, rows=tuple(rows),
        wall_clock_seconds=time.perf_counter() - started,
    )


# --- analyze ---------------------------------------------------------------------------


def _write_grid_csv(path: str, grid) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("y,g_hat,g_tilde_hat,g0_hat\n")
        for i in range(grid.points.size):
            fh.write(
                f"{grid.points[i]!r},{grid.g_hat[i]!r},"
                f"{grid.g_tilde_hat[i]!r},{grid.g0_hat[i]!r}\n"
            )


def cmd_analyze(args, argv) -> int:
    manifest = _Manifest(argv, args, [args.x, args.y_file, args.xtilde, args.ytilde])
    x = read_column(args.x, args.column)
    y = read_column(args.y_file, args.column)
    xt = read_column(args.xtilde, args.column)
    yt = read_column(args.ytilde, args.column)
    window = _parse_floats(args.window)
    if len(window) != 2 or window[0] >= window[1]:
        raise InputError(f"--window must be LO,HI with LO < HI, got {args.window!r}")

    grid = build_grid(y, yt, x, xt, M=args.grid_points)
    fits = {col: ols_fit(grid, col, (window[0], window[1])) for col in ("g", "g_tilde", "g0")}

    parametric: dict[str, object] = {"g": None, "g_tilde": None, "g0": None}
    if x.size == y.size:
        parametric["g"] = parametric_affine(x, y)
    if xt.size == yt.size:
        parametric["g_tilde"] = parametric_affine(xt, yt)
    if parametric["g"] is not None and parametric["g_tilde"] is not None:
        w, w_t = x.size + y.size, xt.size + yt.size
        from .analysis import LinearFit

        parametric["g0"] = LinearFit(
            slope=(w * parametric["g"].slope + w_t * parametric["g_tilde"].slope) / (w + w_t),
            intercept=(w * parametric["g"].intercept + w_t * parametric["g_tilde"].intercept)
            / (w + w_t),
            window_lo=float(min(y.min(), yt.min())),
            window_hi=float(max(y.max(), yt.max())),
            points_used=int(x.size + xt.size),
        )

    moments = []
    for target, ref, obs in (("X", y, x), ("X_tilde", yt, xt)):
        obs_mean, obs_var = float(np.mean(obs)), float(np.var(obs, ddof=1))
        ref_mean, ref_var = float(np.mean(ref)), float(np.var(ref, ddof=1))
        rows = [("nonparametric", fits["g0"])]
        if parametric["g0"] is not None:
            rows.append(("parametric", parametric["g0"]))
        for approach, fit in rows:
            pred_mean, pred_var = predict_moments(fit, ref_mean, ref_var)
            moments.append(
                {
                    "target": target,
                    "approach": approach,
                    "predicted_mean": pred_mean,
                    "observed_mean": obs_mean,
                    "predicted_var": pred_var,
                    "observed_var": obs_var,
                }
            )

    prefix = args.out
    _write_grid_csv(f"{prefix}_grid.csv", grid)

    with open(f"{prefix}_moments.csv", "w", encoding="utf-8") as fh:
        fh.write("target,approach,predicted_mean,observed_mean,predicted_var,observed_var\n")
        for m in moments:
            fh.write(
                f"{m['target']},{m['approach']},{m['predicted_mean']!r},"
                f"{m['observed_mean']!r},{m['predicted_var']!r},{m['observed_var']!r}\n"
            )

    payload = {
        "interval": {"c": grid.c, "d": grid.d},
        "window": {"lo": window[0], "hi": window[1]},
        "grid_points": args.grid_points,
        "nonparametric_fits": {k: f.as_dict() for k, f in fits.items()},
        "parametric_fits": {
            k: (None if f is None else f.as_dict()) for k, f in parametric.items()
        },
        "moment_predictions": moments,
        "descriptives": {
            "Y": describe(y).as_dict(),
            "X": describe(x).as_dict(),
            "Y_tilde": describe(yt).as_dict(),
            "X_tilde": describe(xt).as_dict(),
        },
    }
    dump_json(f"{prefix}_fits.json", payload)

    curves_svg = line_plot_svg(
        [
            ("g_hat", grid.points, grid.g_hat),
            ("g_tilde_hat", grid.points, grid.g_tilde_hat),
            ("g0_hat", grid.points, grid.g0_hat),
        ],
        title="Estimated transformations on the common range",
        x_label="reference signal",
        y_label="observed signal",
    )
    with open(f"{prefix}_curves.svg", "w", encoding="utf-8") as fh:
        fh.write(curves_svg)

    dens_curves = []
    with open(f"{prefix}_densities.csv", "w", encoding="utf-8") as fh:
        fh.write("sample,x,density\n")
        for label, values in (("Y", y), ("X", x), ("Y_tilde", yt), ("X_tilde", xt)):
            xs, ds = density_curve(values, points=args.density_points)
            dens_curves.append((label, xs, ds))
            for xi, di in zip(xs, ds):
                fh.write(f"{label},{xi!r},{di!r}\n")
    with open(f"{prefix}_densities.svg", "w", encoding="utf-8") as fh:
        fh.write(
            line_plot_svg(
                dens_curves,
                title="Kernel density estimates",
                x_label="value",
                y_label="density",
            )
        )

    manifest.write(prefix)

    sys.stdout.write(f"common range: [{grid.c:.6g}, {grid.d:.6g}]\n")
    for name, fit in fits.items():
        sys.stdout.write(
            f"{name:8s} ~ {fit.slope:.6g} * y + {fit.intercept:.6g} "
            f"({fit.points_used} grid points in window)\n"
        )
    for m in moments:
        sys.stdout.write(
            f"{m['target']:8s} {m['approach']:14s} mean {m['predicted_mean']:.6g} "
            f"(observed {m['observed_mean']:.6g})  var {m['predicted_var']:.6g} "
            f"(observed {m['observed_var']:.6g})\n"
        )
    return EXIT_OK


# --- parser ----------------------------------------------------------------------------


def _add_schedule_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--c1", type=float, default=0.5,
                   help="bandwidth exponent: h = n^(-c1) (default 0.5)")
    p.add_argument("--c2", type=float, default=1.0,
                   help="trimming exponent: e = n^(-c2); the default 1.0 keeps the "
                        "floor below the kernel's own-point mass so it acts as a "
                        "numerical guard only (use 0.2 for the aggressive floor)")
    p.add_argument("--k", type=int, default=2, help="assumed smoothness order")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xformtest",
        description="Test whether two observed signals arise from the same "
        "monotone transformation of two reference signals.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p1 = sub.add_parser("test-case1", help="test with known reference distributions")
    p1.add_argument("--x", required=True, help="observed sample of the first signal")
    p1.add_argument("--xtilde", required=True, help="observed sample of the second signal")
    p1.add_argument("--ref", default="normal",
                    help="'normal' or a CSV quantile table x,p (default: normal)")
    p1.add_argument("--ref-tilde", default=None,
                    help="reference for the second signal (default: same as --ref)")
    p1.add_argument("--y", default="random", help="evaluation point, or 'random'")
    p1.add_argument("--alpha", type=float, default=0.05)
    p1.add_argument("--column", default=None, help="CSV column to read")
    p1.add_argument("--seed", type=int, default=0)
    p1.add_argument("--out", default=None, help="also write <out>.json and a manifest")
    _add_schedule_flags(p1)
    p1.set_defaults(func=cmd_test_case1)

    p2 = sub.add_parser("test-case2", help="test with reference training samples")
    p2.add_argument("--x", required=True)
    p2.add_argument("--y", dest="y_file", required=True, help="training sample of the first reference")
    p2.add_argument("--xtilde", required=True)
    p2.add_argument("--ytilde", required=True, help="training sample of the second reference")
    p2.add_argument("--point", dest="y", default="random",
                    help="evaluation point, or 'random' (default)")
    p2.add_argument("--alpha", type=float, default=0.05)
    p2.add_argument("--column", default=None)
    p2.add_argument("--seed", type=int, default=0)
    p2.add_argument("--out", default=None)
    _add_schedule_flags(p2)
    p2.set_defaults(func=cmd_test_case2)

    ps = sub.add_parser("simulate", help="run level/power studies")
    ps.add_argument("--table", choices=["1", "3", "4", "custom"], required=True)
    ps.add_argument("--reps", type=int, default=10_000)
    ps.add_argument("--sizes", default=",".join(str(s) for s in DEFAULT_SIZES))
    ps.add_argument("--betas", default=",".join(f"{b:g}" for b in DEFAULT_BETAS),
                    help="shrink exponents for table 4")
    ps.add_argument("--alpha", type=float, default=0.05)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--threads", type=int,
                    default=int(os.environ.get("XFORMTEST_THREADS", "1")),
                    help="worker threads (default: XFORMTEST_THREADS or 1)")
    ps.add_argument("--case", choices=["case1", "case2"], default="case1",
                    help="custom table: which statistic's setting")
    ps.add_argument("--alternative", default="null_exp",
                    choices=["null_exp", "shift_exp", "scale_exp", "neg_ratio",
                             "affine", "local_shift"],
                    help="custom table: the second transformation")
    ps.add_argument("--beta", type=float, default=None, help="custom local_shift exponent")
    ps.add_argument("--out", required=True, help="output prefix for CSV/JSON/manifest")
    _add_schedule_flags(ps)
    ps.set_defaults(func=cmd_simulate)

    pa = sub.add_parser("analyze", help="grid estimation and linearization pipeline")
    pa.add_argument("--x", required=True)
    pa.add_argument("--y", dest="y_file", required=True)
    pa.add_argument("--xtilde", required=True)
    pa.add_argument("--ytilde", required=True)
    pa.add_argument("--grid-points", type=int, default=50)
    pa.add_argument("--window", default="100,200", help="OLS window LO,HI")
    pa.add_argument("--density-points", type=int, default=200)
    pa.add_argument("--column", default=None)
    pa.add_argument("--out", required=True, help="output prefix")
    pa.set_defaults(func=cmd_analyze)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, ["xformtest"] + argv)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    except DegeneratePointError as exc:
        sys.stderr.write(f"degenerate evaluation point: {exc}\n")
        return EXIT_DEGENERATE
    except NoOverlapError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NO_OVERLAP
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
