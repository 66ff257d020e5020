"""Command-line front end.

Subcommands cover the analysis surface of the library: splitting-function
amplitudes and parameter regions, secondary bifurcation curves, manifold
and lobe geometry, Lyapunov sweeps, basin grids, and attractor clouds.
All numeric output is CSV (full round-trip precision) or JSON; identical
configurations produce identical bytes.  SVG renderings are a convenience
layered on the CSV data, enabled with --svg.
"""

import argparse
import csv
import dataclasses
import json
import os
import sys

import numpy as np

from . import chaos, manifolds, melnikov, smf
from .dynamics import Params, PhaseState
from .integrate import EscapeError, IntegratorConfig, poincare_step

PARAM_KEYS = ("epsilon", "delta", "gamma", "omega", "beta")


def _parse_value(text):
    if "," in text:
        return [_parse_value(t) for t in text.split(",") if t != ""]
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    return text


def load_config(path):
    """Read a plain key=value configuration file ('#' starts a comment)."""
    out = {}
    with open(path) as fh:
        for line_no, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{line_no}: expected key=value")
            key, val = line.split("=", 1)
            out[key.strip()] = _parse_value(val.strip())
    return out


def merge_config(args):
    cfg = {}
    if getattr(args, "config", None):
        cfg.update(load_config(args.config))
    for item in getattr(args, "set", None) or []:
        if "=" not in item:
            raise ValueError(f"override '{item}' is not key=value")
        key, val = item.split("=", 1)
        cfg[key.strip()] = _parse_value(val.strip())
    return cfg


def params_from(cfg, **defaults):
    vals = dict(epsilon=0.1, delta=0.1, gamma=1.0, omega=1.0, beta=0.0)
    vals.update(defaults)
    for key in PARAM_KEYS:
        if key in cfg:
            vals[key] = float(cfg[key])
    return Params(**vals)


def integrator_from(cfg):
    return IntegratorConfig(
        rel_tol=float(cfg.get("rel_tol", 1e-10)),
        abs_tol=float(cfg.get("abs_tol", 1e-12)),
        max_step=float(cfg.get("max_step", 10.0)))


def value_range(cfg, name, default_start, default_stop, default_count):
    start = float(cfg.get(f"{name}_start", default_start))
    stop = float(cfg.get(f"{name}_stop", default_stop))
    count = int(cfg.get(f"{name}_count", default_count))
    if count < 1:
        raise ValueError(f"{name}_count must be >= 1")
    return np.linspace(start, stop, count)


def write_csv(path, header, rows):
    def fmt(v):
        if isinstance(v, (float, np.floating)):
            return repr(float(v))
        if isinstance(v, np.integer):
            return int(v)
        return v

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _maybe_plot(args, draw, name):
    if not getattr(args, "svg", False):
        return
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    draw(ax)
    fig.tight_layout()
    fig.savefig(os.path.join(args.out, name), metadata={"Date": None})
    plt.close(fig)


def cmd_melnikov(args):
    cfg = merge_config(args)
    beta = float(cfg.get("beta", 0.0))
    omegas = value_range(cfg, "omega", 0.1, 6.0, 60)
    rows = []
    for om in omegas:
        c = melnikov.coeffs(om, beta)
        r0m, r0p = melnikov.primary_thresholds(om, beta)
        rows.append((float(om), c.f1, c.f2, c.f2 / c.f1,
                     c.f1 + beta * c.f2, c.f1 - beta * c.f2, r0m, r0p))
    write_csv(os.path.join(args.out, "melnikov_amplitudes.csv"),
              ["omega", "f1", "f2", "ratio_f2_f1", "f_left", "f_right",
               "r0_minus", "r0_plus"], rows)

    ratios = value_range(cfg, "ratio", 0.05, 2.0, 60)  # delta/gamma axis
    region_rows = []
    for om in omegas:
        for dg in ratios:
            p = Params(epsilon=0.1, delta=float(dg), gamma=1.0,
                       omega=float(om), beta=beta)
            region_rows.append((float(om), float(dg),
                                melnikov.classify_region(p).name))
    write_csv(os.path.join(args.out, "melnikov_regions.csv"),
              ["omega", "delta_over_gamma", "region"], region_rows)

    def draw(ax):
        data = np.asarray([r[:4] for r in rows])
        ax.plot(data[:, 0], data[:, 1], label="odd amplitude")
        ax.plot(data[:, 0], data[:, 2], label="even amplitude")
        ax.plot(data[:, 0], data[:, 3], label="ratio")
        ax.set_xlabel("omega")
        ax.legend()
    _maybe_plot(args, draw, "melnikov_amplitudes.svg")
    return 0


def cmd_smf_curves(args):
    cfg = merge_config(args)
    shape = params_from(cfg)
    pairs = cfg.get("pairs", ["lr"])
    if isinstance(pairs, str):
        pairs = [pairs]
    ell = int(cfg.get("ell", 1))
    branches = cfg.get("branches", [1, 2])
    if isinstance(branches, int):
        branches = [branches]
    omegas = value_range(cfg, "omega", 1.0, 3.0, 21)
    any_points = False
    for pair_name in pairs:
        pair = smf.Pair[pair_name.upper()]
        columns = {}
        for branch_i in branches:
            columns[branch_i] = smf.bifurcation_curve(
                pair, ell, branch_i, omegas, shape)
        rows = []
        for i, om in enumerate(omegas):
            row = [float(om)]
            lower = None
            for branch_i in branches:
                pt = columns[branch_i][i]
                bif = pt.bifurcation
                if bif is not None:
                    row.extend([bif.epsilon, bif.t0, bif.transition_j,
                                int(bif.refined), int(bif.resonance_flag)])
                    any_points = True
                else:
                    row.extend([float("nan")] * 3 + [0, 0])
                lower = pt.lower_bound
            row.append(lower if lower is not None else float("nan"))
            rows.append(row)
        header = ["omega"]
        for branch_i in branches:
            header += [f"epsilon{branch_i}", f"t0_{branch_i}",
                       f"transition_j_{branch_i}", f"refined_{branch_i}",
                       f"resonance_flag_{branch_i}"]
        header.append("lower_bound")
        write_csv(os.path.join(args.out, f"smf_curve_{pair_name}_l{ell}.csv"),
                  header, rows)
    if not any_points:
        write_json(os.path.join(args.out, "smf_failure.json"),
                   {"error": "no bifurcation point converged on the sweep"})
        return 3
    return 0


def cmd_manifolds(args):
    cfg = merge_config(args)
    p = params_from(cfg)
    icfg = integrator_from(cfg)
    theta = float(cfg.get("theta", 0.0))
    budget = float(cfg.get("arc_budget", 9.0))
    sides = cfg.get("sides", ["left", "right"])
    if isinstance(sides, str):
        sides = [sides]
    curve_rows = []
    pip_rows = []
    lobe_rows = []
    curves = {}
    for side in sides:
        for kind in ("unstable", "stable"):
            cur = manifolds.grow_manifold(kind, side, p, icfg, theta,
                                          arc_budget=budget)
            curves[(kind, side)] = cur
            for pt, u, arc in zip(cur.points, cur.u, cur.arcs):
                curve_rows.append((kind, side, float(pt[0]), float(pt[1]),
                                   float(arc), float(u)))
        pips = manifolds.find_pips(curves[("unstable", side)],
                                   curves[("stable", side)])
        for i, q in enumerate(pips):
            pip_rows.append((side, i, q.point[0], q.point[1], q.u_arc,
                             q.s_arc, q.angle, int(q.tangential)))
        lobes = manifolds.extract_lobes(curves[("unstable", side)],
                                        curves[("stable", side)], pips)
        for i, lb in enumerate(lobes):
            lobe_rows.append((side, i, lb.area, len(lb.boundary)))
    write_csv(os.path.join(args.out, "manifold_curves.csv"),
              ["kind", "side", "x", "y", "arclength", "u"], curve_rows)
    write_csv(os.path.join(args.out, "manifold_pips.csv"),
              ["side", "index", "x", "y", "u_arc", "s_arc", "angle",
               "tangential"], pip_rows)
    write_csv(os.path.join(args.out, "manifold_lobes.csv"),
              ["side", "index", "area", "boundary_points"], lobe_rows)

    def draw(ax):
        for (kind, side), cur in curves.items():
            style = "-" if kind == "unstable" else "--"
            ax.plot(cur.points[:, 0], cur.points[:, 1], style, lw=0.7,
                    label=f"{kind} {side}")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.legend(fontsize=7)
    _maybe_plot(args, draw, "manifold_curves.svg")
    return 0


def _lyapunov_point(task):
    om, eps, shape_dict, lcfg_dict, icfg_dict, theta, x0, y0 = task
    p = Params(**dict(shape_dict, omega=om, epsilon=eps))
    lcfg = chaos.LyapunovConfig(**lcfg_dict)
    icfg = IntegratorConfig(**icfg_dict)
    rep = chaos.lyapunov_run(PhaseState(x0, y0), p, lcfg, icfg, theta)
    lam1 = rep.exponents[0] if rep.exponents else float("nan")
    lam2 = rep.exponents[-1] if len(rep.exponents) > 1 else float("nan")
    expected = -eps * p.delta * p.forcing_period / np.log(2.0)
    sum_err = (rep.exponent_sum - expected
               if rep.exponent_sum is not None else float("nan"))
    return (om, eps, rep.verdict, lam1, lam2,
            rep.per_time[0] if rep.per_time else float("nan"),
            sum_err,
            rep.dimension if rep.dimension is not None else float("nan"),
            rep.sidedness or "", rep.iterations)


def cmd_lyapunov(args):
    cfg = merge_config(args)
    shape = params_from(cfg)
    icfg = integrator_from(cfg)
    theta = float(cfg.get("theta", 0.0))
    lcfg = chaos.LyapunovConfig(
        n_transient=int(cfg.get("n_transient", 200)),
        n_fit=int(cfg.get("n_fit", 100)),
        slope_tol=float(cfg.get("slope_tol", 1e-6)),
        max_iters=int(cfg.get("max_iters", 10000)))
    x0 = float(cfg.get("x0", 0.9))
    y0 = float(cfg.get("y0", 0.0))
    if "omega_start" in cfg or "epsilon_values" in cfg:
        omegas = value_range(cfg, "omega", shape.omega, shape.omega, 1)
        eps_vals = cfg.get("epsilon_values")
        along = cfg.get("along_curve")  # e.g. 'lr' to follow its l=0 curve
        tasks = []
        for om in omegas:
            if along:
                ps = dataclasses.replace(shape, omega=float(om))
                try:
                    seed = smf.seed_point(smf.Pair[along.upper()],
                                          int(cfg.get("ell", 0)), 1, ps)
                    bif = smf.refine_secondary_bifurcation(
                        seed, smf.Pair[along.upper()],
                        int(cfg.get("ell", 0)), ps, branch_i=1)
                    eps_list = [bif.epsilon]
                except Exception:
                    continue
            else:
                eps_list = [float(e) for e in np.atleast_1d(
                    eps_vals if eps_vals is not None else [shape.epsilon])]
            for eps in eps_list:
                tasks.append((float(om), float(eps),
                              dataclasses.asdict(shape),
                              dataclasses.asdict(lcfg),
                              dataclasses.asdict(icfg), theta, x0, y0))
        if args.workers > 1:
            import concurrent.futures
            with concurrent.futures.ProcessPoolExecutor(args.workers) as ex:
                results = list(ex.map(_lyapunov_point, tasks))
        else:
            results = [_lyapunov_point(t) for t in tasks]
        write_csv(os.path.join(args.out, "lyapunov_sweep.csv"),
                  ["omega", "epsilon", "verdict", "lambda1_log2_per_iter",
                   "lambda2_log2_per_iter", "lambda1_log2_per_time",
                   "exponent_sum_error", "dimension", "sidedness",
                   "iterations"], results)
        return 0
    rep = chaos.lyapunov_run(PhaseState(x0, y0), shape, lcfg, icfg, theta)
    write_json(os.path.join(args.out, "lyapunov_report.json"),
               dict(rep.to_dict(), params=dataclasses.asdict(shape),
                    theta=theta, x0=x0, y0=y0))
    return 0


def cmd_basins(args):
    cfg = merge_config(args)
    shape = params_from(cfg)
    icfg = integrator_from(cfg)
    theta = float(cfg.get("theta", 0.0))
    nx = int(cfg.get("nx", 33))
    ny = int(cfg.get("ny", 33))
    grid_kw = dict(nx=nx, ny=ny,
                   n_transient=int(cfg.get("n_transient", 200)),
                   n_sample=int(cfg.get("n_sample", 100)),
                   max_iters=int(cfg.get("max_iters", 2000)))
    eps_vals = cfg.get("epsilon_values")
    if eps_vals is not None:
        rows, notes = chaos.basin_fraction_sweep(
            [float(e) for e in np.atleast_1d(eps_vals)], shape, icfg, theta,
            **grid_kw)
        write_csv(os.path.join(args.out, "basin_fractions.csv"),
                  ["epsilon"] + list(chaos.BasinGrid.LABELS),
                  [[r["epsilon"]] + [r[k] for k in chaos.BasinGrid.LABELS]
                   for r in rows])
        write_json(os.path.join(args.out, "basin_annotations.json"), notes)
        return 0
    grid = chaos.basin_map(shape, icfg, theta, **grid_kw)
    cell_rows = []
    for iy, y in enumerate(grid.ys):
        for ix, x in enumerate(grid.xs):
            cell_rows.append((float(x), float(y), grid.labels[iy, ix]))
    write_csv(os.path.join(args.out, "basin_grid.csv"),
              ["x", "y", "label"], cell_rows)
    write_json(os.path.join(args.out, "basin_summary.json"),
               {"fractions": grid.fractions,
                "params": dataclasses.asdict(shape),
                "resolution": [nx, ny]})

    def draw(ax):
        order = {name: i for i, name in enumerate(chaos.BasinGrid.LABELS)}
        img = np.vectorize(order.get)(grid.labels)
        ax.imshow(img, origin="lower",
                  extent=[grid.xs[0], grid.xs[-1], grid.ys[0], grid.ys[-1]])
        ax.set_xlabel("x")
        ax.set_ylabel("y")
    _maybe_plot(args, draw, "basin_grid.svg")
    return 0


def cmd_attractor(args):
    cfg = merge_config(args)
    p = params_from(cfg)
    icfg = integrator_from(cfg)
    theta = float(cfg.get("theta", 0.0))
    n_transient = int(cfg.get("n_transient", 200))
    n_points = int(cfg.get("n_points", 2000))
    cur = PhaseState(float(cfg.get("x0", 0.9)), float(cfg.get("y0", 0.0)))
    rows = []
    try:
        for _ in range(n_transient):
            cur = poincare_step(cur, theta, p, icfg)
        for k in range(n_points):
            cur = poincare_step(cur, theta, p, icfg)
            rows.append((k, cur.x, cur.y))
    except EscapeError as err:
        write_json(os.path.join(args.out, "attractor_failure.json"),
                   {"error": str(err)})
        return 3
    write_csv(os.path.join(args.out, "attractor_cloud.csv"),
              ["iterate", "x", "y"], rows)

    def draw(ax):
        data = np.asarray([r[1:] for r in rows])
        ax.plot(data[:, 0], data[:, 1], ".", ms=1.0)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
    _maybe_plot(args, draw, "attractor_cloud.svg")
    return 0


COMMANDS = {
    "melnikov": cmd_melnikov,
    "smf-curves": cmd_smf_curves,
    "manifolds": cmd_manifolds,
    "lyapunov": cmd_lyapunov,
    "basins": cmd_basins,
    "attractor": cmd_attractor,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="afdo",
        description="Homoclinic-tangle analysis of the asymmetrically "
                    "forced damped Duffing oscillator")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="key=value configuration file")
        sp.add_argument("--set", "-s", action="append", metavar="KEY=VALUE",
                        help="override a configuration entry")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--svg", action="store_true",
                        help="also write SVG renderings")
        sp.add_argument("--workers", type=int, default=1,
                        help="parallel workers for sweeps")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        os.makedirs(args.out, exist_ok=True)
        return COMMANDS[args.command](args)
    except (ValueError, KeyError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except Exception as err:  # computation failure
        print(f"computation failed: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
