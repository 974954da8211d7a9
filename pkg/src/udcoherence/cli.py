"""Command-line front end.

    udcoherence compute --e-bar 1 --t-bar 1e-3
    udcoherence sweep --acceleration 2 --n-e 80 --n-t 80 --out acc.json
    udcoherence sweep --out rest.json
    udcoherence diff acc.json rest.json --out d.json
    udcoherence regions d.json --threshold 0 --out regions.json
    udcoherence curve --e-bar 0.25 --trajectories rest,v=0.8,a=2 --out fig4.csv

Exit status: 0 success, 2 usage error, 3 validation error, 4 computation error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import formats
from .qfield import (
    CoherenceError,
    ConstantVelocity,
    Rest,
    UniformAcceleration,
    coherence,
    trajectory_from_tag,
)
from .sweep import (
    DecoherenceCurve,
    DiffGrid,
    GridSpec,
    SweepError,
    SweepGrid,
    decoherence_curve,
    diff_grid,
    swelling_regions,
    sweep_grid,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_COMPUTATION = 4


class ValidationError(Exception):
    pass


def _add_common(p, trajectory=True):
    if trajectory:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--velocity", type=float, help="constant speed in units of c (|v| < 1)")
        g.add_argument("--acceleration", type=float, help="reduced proper acceleration a/Omega (> 0)")
    p.add_argument("--rel-tol", type=float, help="relative quadrature tolerance")
    p.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    p.add_argument("--format", choices=["csv", "json"], help="output format (default: from --out)")
    p.add_argument("--out", help="output file")
    p.add_argument("--emit-plot-script", action="store_true",
                   help="also write a matplotlib script next to --out")
    p.add_argument("--config", help="JSON file of defaults; command-line flags win")


def _add_grid(p):
    p.add_argument("--e-min", type=float, default=0.1)
    p.add_argument("--e-max", type=float, default=5.0)
    p.add_argument("--t-min", type=float, default=0.1)
    p.add_argument("--t-max", type=float, default=5.0)
    p.add_argument("--n-e", type=int, default=80)
    p.add_argument("--n-t", type=int, default=80)
    p.add_argument("--log", action="store_true", help="logarithmic axis spacing")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="udcoherence",
        description="Coherence extracted by a moving Unruh-DeWitt detector from a coherent field.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="single coherence value")
    p.add_argument("--e-bar", type=float, required=True, help="field energy E/Omega")
    p.add_argument("--t-bar", type=float, required=True, help="interaction duration Omega*T")
    _add_common(p)

    p = sub.add_parser("sweep", help="coherence over an (E/Omega, Omega*T) grid")
    _add_grid(p)
    _add_common(p)

    p = sub.add_parser("diff", help="difference of two grid files, MINUEND - SUBTRAHEND")
    p.add_argument("minuend")
    p.add_argument("subtrahend")
    _add_common(p, trajectory=False)

    p = sub.add_parser("regions", help="swelling regions of a difference grid")
    p.add_argument("diff")
    p.add_argument("--threshold", type=float, default=0.0)
    _add_common(p, trajectory=False)

    p = sub.add_parser("curve", help="coherence against Omega*T at fixed E/Omega")
    p.add_argument("--e-bar", type=float, required=True)
    p.add_argument("--t-min", type=float, default=0.05)
    p.add_argument("--t-max", type=float, default=5.0)
    p.add_argument("--n", type=int, default=100, help="number of Omega*T samples")
    p.add_argument("--trajectories", default=None,
                   help="comma-separated tags: rest, v=<speed>, a=<acceleration>")
    _add_common(p)
    return parser


def _parse(argv):
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        try:
            with open(known.config) as fh:
                cfg = json.load(fh)
        except (OSError, ValueError) as exc:
            raise ValidationError(f"--config: cannot load {known.config}: {exc}") from exc
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
        sub_action = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
        for subparser in sub_action.choices.values():
            dests = {a.dest for a in subparser._actions}
            subparser.set_defaults(**{k: v for k, v in cfg.items() if k in dests})
            # required flags supplied by the config file are no longer required
            for a in subparser._actions:
                if a.dest in cfg:
                    a.required = False
    return parser.parse_args(argv)


# ---------------------------------------------------------------------------

def _positive(name, x):
    if x is None or not math.isfinite(x) or x <= 0:
        raise ValidationError(f"{name} must be a finite positive number, got {x!r}")


def _trajectory(args):
    if getattr(args, "velocity", None) is not None:
        if not abs(args.velocity) < 1:
            raise ValidationError(f"--velocity must satisfy |v| < 1, got {args.velocity!r}")
        return ConstantVelocity(args.velocity)
    if getattr(args, "acceleration", None) is not None:
        if not (math.isfinite(args.acceleration) and args.acceleration > 0):
            raise ValidationError(
                f"--acceleration must be > 0 (omit it for a detector at rest), "
                f"got {args.acceleration!r}")
        return UniformAcceleration(args.acceleration)
    return Rest()


def _rel_tol(args, default):
    tol = args.rel_tol if args.rel_tol is not None else default
    if not 1e-10 <= tol <= 1e-2:
        raise ValidationError(f"--rel-tol must lie in [1e-10, 1e-2], got {tol!r}")
    return tol


def _out_format(args):
    if args.format:
        return args.format
    if args.out:
        try:
            return formats.detect_format(args.out)
        except ValueError as exc:
            raise ValidationError(f"--out: {exc}") from exc
    return "csv"


def _workers(args):
    if args.workers < 1:
        raise ValidationError(f"--workers must be >= 1, got {args.workers}")
    return args.workers


def _emit(obj, args):
    if not args.out:
        return
    fmt = _out_format(args)
    formats.write(obj, args.out, fmt)
    if args.emit_plot_script:
        write_plot_script(obj, args.out)


def _cmd_compute(args):
    _positive("--e-bar", args.e_bar)
    _positive("--t-bar", args.t_bar)
    traj = _trajectory(args)
    tol = _rel_tol(args, 1e-6)
    _out_format(args)
    res = coherence(traj, args.e_bar, args.t_bar, tol)
    print(f"C/g = {res.c_over_g:.10g} +/- {res.err_estimate:.2g} "
          f"[{traj.tag}, e_bar={args.e_bar:g}, t_bar={args.t_bar:g}, {res.method.value}]")
    if args.out:
        fmt = _out_format(args)
        formats.write_point(res, traj, args.e_bar, args.t_bar, args.out, fmt)


def _grid_spec(args):
    try:
        return GridSpec(args.e_min, args.e_max, args.t_min, args.t_max, args.n_e, args.n_t,
                        "log" if args.log else "linear")
    except ValueError as exc:
        raise ValidationError(f"--e-min/--e-max/--t-min/--t-max/--n-e/--n-t: {exc}") from exc


def _cmd_sweep(args):
    spec = _grid_spec(args)
    traj = _trajectory(args)
    tol = _rel_tol(args, 1e-5)
    _out_format(args)
    grid = sweep_grid(traj, spec, tol, _workers(args))
    _emit(grid, args)
    print(f"sweep {traj.tag}: {grid.values.size} cells, {int(grid.flagged.sum())} flagged"
          + (f" -> {args.out}" if args.out else ""))


def _read(path, label):
    try:
        return formats.read(path)
    except (OSError, ValueError, KeyError) as exc:
        raise ValidationError(f"{label}: {exc}") from exc


def _cmd_diff(args):
    a = _read(args.minuend, "minuend")
    b = _read(args.subtrahend, "subtrahend")
    if not (isinstance(a, SweepGrid) and isinstance(b, SweepGrid)):
        raise ValidationError("diff needs two sweep grid files")
    if a.trajectory is None or b.trajectory is None:
        raise ValidationError("diff needs JSON grid files (CSV grids carry no trajectory)")
    try:
        d = diff_grid(a, b)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    _emit(d, args)
    print(f"diff {d.minuend} - {d.subtrahend}: {int((d.values > 0).sum())} positive of "
          f"{d.values.size} cells" + (f" -> {args.out}" if args.out else ""))


def _cmd_regions(args):
    d = _read(args.diff, "diff")
    if not isinstance(d, DiffGrid):
        raise ValidationError("regions needs a difference grid file")
    if not args.threshold >= 0:
        raise ValidationError(f"--threshold must be >= 0, got {args.threshold!r}")
    rep = swelling_regions(d, args.threshold)
    _emit(rep, args)
    print(f"regions: {len(rep.cells)} cells in {len(rep.components)} components"
          + (f" -> {args.out}" if args.out else ""))
    for k, comp in enumerate(rep.components):
        print(f"  [{k}] {len(comp.cells)} cells, E/Omega in "
              f"[{comp.e_bar_range[0]:.4g}, {comp.e_bar_range[1]:.4g}], Omega*T in "
              f"[{comp.t_bar_range[0]:.4g}, {comp.t_bar_range[1]:.4g}], "
              f"peak {comp.peak[4]:.4g}")


def _cmd_curve(args):
    _positive("--e-bar", args.e_bar)
    _positive("--t-min", args.t_min)
    if not args.t_max > args.t_min:
        raise ValidationError("--t-max must exceed --t-min")
    if args.n < 2:
        raise ValidationError(f"--n must be >= 2, got {args.n}")
    if args.trajectories:
        try:
            trajs = [trajectory_from_tag(t) for t in args.trajectories.split(",")]
        except ValueError as exc:
            raise ValidationError(f"--trajectories: {exc}") from exc
    else:
        trajs = [_trajectory(args)]
    tol = _rel_tol(args, 1e-6)
    _out_format(args)
    curve = decoherence_curve(trajs, args.e_bar, (args.t_min, args.t_max), args.n, tol,
                              _workers(args))
    _emit(curve, args)
    print(f"curve e_bar={args.e_bar:g}: {args.n} samples x {len(trajs)} trajectories, "
          f"{int(curve.flagged.sum())} flagged" + (f" -> {args.out}" if args.out else ""))


_COMMANDS = {"compute": _cmd_compute, "sweep": _cmd_sweep, "diff": _cmd_diff,
             "regions": _cmd_regions, "curve": _cmd_curve}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = _parse(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    except ValidationError as exc:
        print(f"error: validation: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        _COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: validation: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (CoherenceError, SweepError) as exc:
        print(f"error: computation: {exc}", file=sys.stderr)
        return EXIT_COMPUTATION
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return EXIT_COMPUTATION
    return EXIT_OK


# ---------------------------------------------------------------------------
# plot scripts
# ---------------------------------------------------------------------------

_HEATMAP = '''\
"""Heatmap of {path} ({label}).  Generated by udcoherence."""
import csv, json
import matplotlib.pyplot as plt
import numpy as np

path = {path!r}
if path.endswith(".json"):
    d = json.load(open(path))
    e, t = np.array(d["axes"]["e_over_omega"]), np.array(d["axes"]["omega_t"])
    z = np.array(d["values"])
else:
    rows = np.array([[float(x) for x in r] for r in list(csv.reader(open(path)))[1:]])
    e, t = np.unique(rows[:, 0]), np.unique(rows[:, 1])
    z = rows[:, 2].reshape(len(e), len(t))
fig, ax = plt.subplots()
{cmap_line}
mesh = ax.pcolormesh(e, t, z.T, shading="auto", cmap=cmap, norm=norm)
fig.colorbar(mesh, label={label!r})
ax.set_xlabel("E/Omega")
ax.set_ylabel("Omega T")
fig.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
'''

_LINES = '''\
"""Coherence against interaction duration from {path}.  Generated by udcoherence."""
import csv, json
import matplotlib.pyplot as plt
import numpy as np

path = {path!r}
if path.endswith(".json"):
    d = json.load(open(path))
    t, tags, z = np.array(d["axes"]["omega_t"]), d["trajectories"], np.array(d["values"])
else:
    rows = list(csv.reader(open(path)))
    tags = rows[0][1:]
    arr = np.array([[float(x) for x in r] for r in rows[1:]])
    t, z = arr[:, 0], arr[:, 1:]
fig, ax = plt.subplots()
for k, tag in enumerate(tags):
    ax.plot(t, z[:, k], label=tag)
ax.set_xlabel("Omega T")
ax.set_ylabel("C/g")
ax.legend()
fig.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
'''


def plot_script_path(out_path) -> str:
    return os.path.splitext(out_path)[0] + ".plot.py"


def write_plot_script(obj, out_path) -> str:
    """Write a standalone matplotlib script that renders ``out_path``."""
    path = os.path.basename(out_path)
    if isinstance(obj, DecoherenceCurve):
        text = _LINES.format(path=path)
    elif isinstance(obj, (SweepGrid, DiffGrid)):
        if isinstance(obj, DiffGrid):
            label = "C_moving/g - C_rest/g"
            cmap_line = ('from matplotlib.colors import TwoSlopeNorm\n'
                         'cmap, norm = "RdBu_r", TwoSlopeNorm(0.0, min(z.min(), -1e-12), '
                         'max(z.max(), 1e-12))')
        else:
            label = "C/g"
            cmap_line = 'cmap, norm = "viridis", None'
        text = _HEATMAP.format(path=path, label=label, cmap_line=cmap_line)
    else:
        raise TypeError("plot scripts exist for grids, difference grids and curves")
    target = plot_script_path(out_path)
    with open(target, "w", newline="\n") as fh:
        fh.write(text)
    return target


if __name__ == "__main__":
    sys.exit(main())
