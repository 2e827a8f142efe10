"""Command-line interface for escape-time experiments.

Every subcommand accepts ``--config FILE`` (a flat JSON document with keys
a, b, tau, tau12_list, ratio_list, trials, seed, cap, out_dir; see
docs/sweep-config.schema.json) plus flag overrides.  The environment
variable MAPESCAPE_OUT_DIR overrides the output directory and nothing else.
"""

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from .experiment import (
    SweepSpec,
    fit_scaling,
    load_records,
    persist_records,
    reproduce_table1,
    run_sweep,
)
from .mfpt import estimate_mfpt, oracle_mfpt_1d, empirical_density_1d
from .model import MapParams, escape_anchors, fixed_points, potential_xy
from .reduction import export_path_csv, reduced_system_for, trace_valley_path
from .theory import make_prediction, wkb_density

CONFIG_KEYS = {
    "a", "b", "tau", "tau12_list", "ratio_list", "trials", "seed", "cap", "out_dir",
}


def _load_config(path):
    with open(path) as fh:
        payload = json.load(fh)
    unknown = set(payload) - CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config key(s): {sorted(unknown)}")
    return payload


def _spec_from(args):
    config = _load_config(args.config) if args.config else {}
    merged = {
        "a": 0.25, "b": 0.5, "tau": 0.05,
        "tau12_list": list(SweepSpec.tau12_list),
        "ratio_list": list(SweepSpec.ratio_list),
        "trials": 500, "seed": 0, "cap": 10 ** 8, "out_dir": "",
    }
    merged.update(config)
    for key in ("a", "b", "tau", "trials", "seed", "cap"):
        value = getattr(args, key.replace("-", "_"), None)
        if value is not None:
            merged[key] = value
    if getattr(args, "tau12_list", None):
        merged["tau12_list"] = args.tau12_list
    if getattr(args, "ratio_list", None):
        merged["ratio_list"] = args.ratio_list
    out_dir = os.environ.get("MAPESCAPE_OUT_DIR") or merged["out_dir"]
    return SweepSpec(
        a=merged["a"], b=merged["b"], tau=merged["tau"],
        tau12_list=tuple(merged["tau12_list"]),
        ratio_list=tuple(merged["ratio_list"]),
        trials=int(merged["trials"]), seed=int(merged["seed"]),
        cap=int(merged["cap"]), out_dir=out_dir,
    )


def _point_params(args):
    cfg = _load_config(args.config) if getattr(args, "config", None) else {}
    a = args.a if args.a is not None else cfg.get("a", 0.25)
    b = args.b if args.b is not None else cfg.get("b", 0.5)
    tau = args.tau if args.tau is not None else cfg.get("tau", 0.05)
    epsilon = 0.0
    if getattr(args, "epsilon", None) is not None:
        epsilon = args.epsilon
    elif getattr(args, "ratio", None) is not None:
        epsilon = tau / args.ratio
    return MapParams.from_ratio(args.tau12, tau=tau, a=a, b=b, epsilon=epsilon)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_fixed_points(args):
    params = _point_params(args)
    print(f"# tau12={params.tau12:.6g} tau1={params.tau1:.6g} tau2={params.tau2:.6g} "
          f"a={params.a} b={params.b}")
    print(f"{'kind':<16}{'x':>14}{'y':>14}{'eig1':>12}{'eig2':>12}")
    for pt in fixed_points(params):
        e1, e2 = pt.eigenvalues
        print(f"{pt.kind:<16}{pt.location.x:>14.8f}{pt.location.y:>14.8f}"
              f"{e1:>12.6f}{e2:>12.6f}")
    return 0


def _cmd_path(args):
    params = _point_params(args)
    fp, sp_plus, _ = escape_anchors(params)
    path = trace_valley_path(params, fp, sp_plus, method=args.method)
    out = args.out or "valley_path.csv"
    export_path_csv(path, params, out)
    print(f"wrote {len(path.arclength)} vertices (length {path.length:.6f}) to {out}")
    return 0


def _cmd_potential_surface(args):
    params = _point_params(args)
    lim = args.extent
    grid = np.linspace(-lim, lim, args.resolution)
    out = args.out or "potential_surface.csv"
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "U"])
        for yi in grid:
            u = potential_xy(grid, np.full_like(grid, yi), params)
            for xi, ui in zip(grid, u):
                writer.writerow([repr(float(xi)), repr(float(yi)), repr(float(ui))])
    print(f"wrote {args.resolution}x{args.resolution} grid to {out}")
    return 0


def _cmd_mfpt(args):
    params = _point_params(args)
    if params.epsilon <= 0:
        raise ValueError("mfpt needs --ratio or --epsilon > 0")
    est = estimate_mfpt(params, args.trials or 500, seed=args.seed or 0,
                        cap=args.cap or 10 ** 8, samples_path=args.samples)
    print(f"trials       : {est.trials}")
    print(f"mean ln T    : {est.mean_ln_t:.6f} +- {est.stderr_ln_t:.6f}")
    print(f"mean T       : {est.mean_t:.3f}")
    print(f"exits +/-    : {est.exit_plus}/{est.exit_minus}")
    print(f"censored     : {est.censored_count} ({'reliable' if est.reliable else 'UNRELIABLE'})")
    return 0


def _cmd_oracle(args):
    params = _point_params(args)
    if params.epsilon <= 0:
        raise ValueError("oracle needs --ratio or --epsilon > 0")
    system = reduced_system_for(params)
    t = oracle_mfpt_1d(system, params.epsilon, spacing=args.grid)
    print(f"oracle t(s_fp) : {t:.6f}")
    print(f"ln t           : {math.log(t):.6f}")
    return 0


def _cmd_density(args):
    params = _point_params(args)
    if params.epsilon <= 0:
        raise ValueError("density needs --ratio or --epsilon > 0")
    system = reduced_system_for(params)
    centers, dens = empirical_density_1d(
        system, params.epsilon, steps=args.steps, bins=args.bins,
        seed=args.seed or 0,
    )
    q = wkb_density(centers, system, params.epsilon)
    out = args.out or "density.csv"
    _write_csv(out, ["s", "empirical", "wkb"],
               [[repr(float(s)), repr(float(d)), repr(float(w))]
                for s, d, w in zip(centers, dens, q)])
    l1 = float(np.sum(np.abs(dens - q)) * (centers[1] - centers[0]))
    print(f"wrote {len(centers)} bins to {out}; L1 distance to theory {l1:.4f}")
    return 0


def _cmd_predict(args):
    params = _point_params(args)
    system = reduced_system_for(params)
    pred = make_prediction(params, system)
    epsilon = params.epsilon if params.epsilon > 0 else params.tau2 / 4.0
    row = {
        "tau12": params.tau12, "a": params.a, "b": params.b,
        "tau": params.tau2, "epsilon": epsilon,
        "delta_u": pred.delta_u, "slope": pred.slope,
        "prefactor": pred.prefactor_c,
        "ln_T_pred": pred.predicted_ln_t(params.tau2, epsilon),
    }
    print(f"delta U     : {pred.delta_u:.6f}")
    print(f"slope (2dU) : {pred.slope:.6f}")
    print(f"prefactor C : {pred.prefactor_c:.6f}")
    print(f"ln T (eps={epsilon:.6g}) : {row['ln_T_pred']:.6f}")
    if args.out:
        from .theory import export_predictions_csv

        export_predictions_csv([row], args.out)
        print(f"wrote prediction row to {args.out}")
    return 0


def _cmd_sweep(args):
    spec = _spec_from(args)
    records = run_sweep(spec, progress=_progress_line)
    if spec.out_dir:
        os.makedirs(spec.out_dir, exist_ok=True)
    out = args.out or os.path.join(spec.out_dir or ".", "records.jsonl")
    persist_records(records, out)
    print(f"wrote {len(records)} records to {out}")
    return 0


def _cmd_regress(args):
    records = load_records(args.records)
    if not records:
        raise ValueError(f"no records loaded from {args.records}")
    rows = []
    for tau12 in sorted({r.tau12 for r in records}):
        series = [r for r in records if r.tau12 == tau12]
        fit = fit_scaling(series, weighted=args.weighted)
        rows.append(fit)
        print(f"tau12={tau12:g}: slope={fit.slope:.4f} +- {fit.slope_stderr:.4f}  "
              f"intercept={fit.intercept:.4f} +- {fit.intercept_stderr:.4f}  "
              f"r2={fit.r_squared:.4f}  n={fit.points_used}")
    if args.out:
        _write_csv(
            args.out,
            ["tau12", "slope", "slope_stderr", "intercept", "intercept_stderr",
             "r_squared", "points_used"],
            [[repr(f.tau12), repr(f.slope), repr(f.slope_stderr), repr(f.intercept),
              repr(f.intercept_stderr), repr(f.r_squared), f.points_used]
             for f in rows],
        )
        print(f"wrote {len(rows)} fits to {args.out}")
    return 0


def _progress_line(record):
    print(f"  tau12={record.tau12:g} ratio={record.ratio:g}: "
          f"<ln T>={record.mean_ln_t:.4f} +- {record.stderr_ln_t:.4f} "
          f"(censored {record.censored_count})", flush=True)


def _cmd_table1(args):
    spec = _spec_from(args)
    report = reproduce_table1(spec, progress=_progress_line if args.verbose else None)
    print(f"{'tau12':>6} {'theory':>8} {'simulated':>20} {'gate':>7}  verdict")
    for row in report.rows:
        print(f"{row.tau12:>6g} {row.theory_slope:>8.4f} "
              f"{row.simulated_slope:>12.4f} +- {row.simulated_stderr:.4f} "
              f"{row.gate:>7.4f}  {'pass' if row.passed else 'FAIL'}")
    if args.out:
        _write_csv(
            args.out,
            ["tau12", "theory_slope", "simulated_slope", "simulated_stderr",
             "gate", "passed"],
            [[repr(r.tau12), repr(r.theory_slope), repr(r.simulated_slope),
              repr(r.simulated_stderr), repr(r.gate), r.passed]
             for r in report.rows],
        )
    if spec.out_dir:
        os.makedirs(spec.out_dir, exist_ok=True)
        persist_records(report.records, os.path.join(spec.out_dir, "records.jsonl"))
    return 0 if report.all_passed else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_common(parser, point=False):
    parser.add_argument("--config", help="flat JSON config file")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--trials", type=int, help="Monte Carlo trials per point")
    parser.add_argument("--out", help="output file")
    parser.add_argument("--a", type=float, help="cubic self-coefficient")
    parser.add_argument("--b", type=float, help="cubic cross-coefficient")
    parser.add_argument("--tau", type=float, help="base growth rate tau2")
    parser.add_argument("--cap", type=int, help="step cap per trial")
    if point:
        parser.add_argument("--tau12", type=float, default=1.0,
                            help="growth-rate ratio tau1/tau2")
        parser.add_argument("--ratio", type=float, help="tau/eps ratio")
        parser.add_argument("--epsilon", type=float, help="noise variance")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mapescape",
        description="Escape times between competing attractors of a noisy coupled map",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fixed-points", help="print critical points and stability")
    _add_common(p, point=True)
    p.set_defaults(func=_cmd_fixed_points)

    p = sub.add_parser("path", help="export the valley path as CSV (s, x, y, U)")
    _add_common(p, point=True)
    p.add_argument("--method", choices=["manifold", "chord"], default="manifold")
    p.set_defaults(func=_cmd_path)

    p = sub.add_parser("potential-surface", help="export a potential grid as CSV")
    _add_common(p, point=True)
    p.add_argument("--extent", type=float, default=3.0, help="half-width of the grid")
    p.add_argument("--resolution", type=int, default=121, help="points per axis")
    p.set_defaults(func=_cmd_potential_surface)

    p = sub.add_parser("mfpt", help="Monte Carlo escape-time estimate at one point")
    _add_common(p, point=True)
    p.add_argument("--samples", help="optional JSON-lines file for per-trial samples")
    p.set_defaults(func=_cmd_mfpt)

    p = sub.add_parser("oracle", help="1D kernel mean-first-passage solve")
    _add_common(p, point=True)
    p.add_argument("--grid", type=float, help="oracle grid spacing (<= sqrt(eps)/10)")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("density", help="empirical vs theoretical 1D density CSV")
    _add_common(p, point=True)
    p.add_argument("--steps", type=int, default=10_000_000)
    p.add_argument("--bins", type=int, default=101)
    p.set_defaults(func=_cmd_density)

    p = sub.add_parser("predict", help="closed-form barrier, slope and prefactor")
    _add_common(p, point=True)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("sweep", help="run a (tau12, tau/eps) sweep from a config")
    _add_common(p)
    p.add_argument("--tau12-list", type=float, nargs="+", dest="tau12_list")
    p.add_argument("--ratio-list", type=float, nargs="+", dest="ratio_list")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("regress", help="fit stored sweep records")
    _add_common(p)
    p.add_argument("--records", required=True, help="JSON-lines records file")
    p.add_argument("--weighted", action="store_true",
                   help="inverse-variance weighted fit")
    p.set_defaults(func=_cmd_regress)

    p = sub.add_parser("table1", help="theory vs simulated slope table; exit 1 on failure")
    _add_common(p)
    p.add_argument("--tau12-list", type=float, nargs="+", dest="tau12_list")
    p.add_argument("--ratio-list", type=float, nargs="+", dest="ratio_list")
    p.add_argument("--verbose", action="store_true", help="print per-point progress")
    p.set_defaults(func=_cmd_table1)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
