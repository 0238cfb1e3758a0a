"""Command line interface.

Subcommands: solve (matching parameters), eval (fields at points), grid
(sampled field export), verify (residual report), advect (particle
trajectories). Outputs are deterministic: fixed column orders, 17
significant digits in CSV, sorted keys in JSON.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext

import numpy as np

from . import _kernels, family as family_mod, single_spiral, verify
from .errors import SpiralSheetError
from .geometry import SpiralFamily, SpiralParams

TWO_PI = 2.0 * math.pi
GRID_COLUMNS = ("x", "y", "u", "v", "speed", "winding", "flag")
ADVECT_COLUMNS = ("t", "particle", "x", "y", "flag")
CHUNK = 4096
HALT_DISTANCE = 1e-6  # advection keep-out, units of local radius


def _fmt(v):
    return format(float(v), ".17g")


def _positive(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _float_list(text):
    try:
        vals = [float(p) for p in text.split(",") if p.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list: {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _int_pair(text):
    try:
        vals = [int(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer pair: {text!r}")
    if len(vals) != 2 or vals[0] < 2 or vals[1] < 2:
        raise argparse.ArgumentTypeError("need nx,ny with both >= 2")
    return vals


def _bounds(text):
    vals = _float_list(text)
    if len(vals) != 4 or not (vals[0] < vals[1] and vals[2] < vals[3]):
        raise argparse.ArgumentTypeError("need x0,x1,y0,y1 with x0<x1, y0<y1")
    return vals


def _points(text):
    pts = []
    for piece in text.split(";"):
        if not piece.strip():
            continue
        parts = piece.split(",")
        if len(parts) != 2:
            raise argparse.ArgumentTypeError(f"bad point {piece!r}, want x,y")
        try:
            pts.append(complex(float(parts[0]), float(parts[1])))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad point {piece!r}")
    if not pts:
        raise argparse.ArgumentTypeError("no points given")
    return pts


def _workers():
    env = os.environ.get("SPIRALSHEET_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            return 1
    return min(4, os.cpu_count() or 1)


def _resolve_target(args, parser):
    """Build the single or family target, solving for missing parameters."""
    if getattr(args, "thetas", None) is not None:
        if getattr(args, "g", None) is not None:
            parser.error("--g applies to a single sheet; use --gs with --thetas")
        if (args.gs is None) != (args.mu is None):
            parser.error("--gs and --mu must be given together")
        try:
            if args.gs is None:
                sol = family_mod.solve_family_matching(args.a, args.thetas)
                return sol.as_family(args.a, args.thetas)
            if len(args.gs) != len(args.thetas):
                parser.error("--gs must match --thetas in length")
            return SpiralFamily(args.a, args.mu, tuple(args.thetas), tuple(args.gs))
        except ValueError as exc:
            parser.error(str(exc))
    if getattr(args, "gs", None) is not None:
        parser.error("--gs needs --thetas")
    if (getattr(args, "g", None) is None) != (getattr(args, "mu", None) is None):
        parser.error("--g and --mu must be given together")
    if args.g is None:
        mu, g = single_spiral.solve_matching(args.a)
        return SpiralParams(args.a, mu, g)
    return SpiralParams(args.a, args.mu, args.g)


def _spiral_rows(target, zs):
    """Field columns at exterior points; flagged points get empty values."""
    r = np.abs(zs)
    th = np.angle(zs)
    rs = np.where(r > 0, r, 1.0)
    if isinstance(target, SpiralParams):
        _, w, status = _kernels.single_field_batch(
            rs, th, target.a, target.g, target.theta0
        )
        j, _ = _kernels.winding_batch(rs, th, target.a, target.theta0)
    else:
        _, w, status, _ = _kernels.family_field_batch(
            rs, th, target.a, target.thetas, target.gs
        )
        j, _ = _kernels.winding_batch(rs, th, target.a, 0.0)
    status = np.where(r > 0, status, _kernels.STATUS_ORIGIN)
    rows = []
    for i in range(len(zs)):
        if status[i] == _kernels.STATUS_OK:
            rows.append((zs[i].real, zs[i].imag, w[i].real, w[i].imag,
                         abs(w[i]), int(j[i]), ""))
        else:
            flag = "origin" if status[i] == _kernels.STATUS_ORIGIN else "on_sheet"
            rows.append((zs[i].real, zs[i].imag, None, None, None, None, flag))
    return rows


def _strip_rows(target, zs):
    """Field columns at strip points; winding is not defined here."""
    x, y = zs.real, zs.imag
    if isinstance(target, SpiralParams):
        w = np.asarray(single_spiral.strip_velocity(zs, target.a, target.mu))
        width = TWO_PI * target.a / (1.0 + target.a * target.a)
        status = np.where((x > 0) | (x < -width), _kernels.STATUS_OUTSIDE,
                          _kernels.STATUS_OK)
    else:
        coeffs = family_mod.strip_coefficients(target.a, target.gs)
        w, status, _ = _kernels.family_strip_batch(
            x, y, target.a, target.thetas, coeffs.a1, coeffs.a2
        )
    rows = []
    for i in range(len(zs)):
        if status[i] == _kernels.STATUS_OK:
            rows.append((x[i], y[i], w[i].real, w[i].imag, abs(w[i]), None, ""))
        else:
            flag = ("on_line" if status[i] == _kernels.STATUS_ON_SHEET
                    else "outside")
            rows.append((x[i], y[i], None, None, None, None, flag))
    return rows


def _eval_chunked(target, zs, frame):
    fn = _spiral_rows if frame == "spiral" else _strip_rows
    if len(zs) <= CHUNK:
        return fn(target, zs)
    chunks = [zs[i:i + CHUNK] for i in range(0, len(zs), CHUNK)]
    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        parts = list(pool.map(lambda c: fn(target, c), chunks))
    return [row for part in parts for row in part]


def _open_out(path):
    if path in (None, "-"):
        return nullcontext(sys.stdout)
    return open(path, "w", newline="")


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, int):
        return str(v)
    return _fmt(v)


def _json_cell(v):
    if v is None or isinstance(v, (str, int)):
        return v
    return float(v)


def _write_rows(args, columns, rows, meta):
    with _open_out(args.out) as f:
        if args.format == "json":
            payload = dict(meta)
            payload["columns"] = list(columns)
            payload["rows"] = [[_json_cell(v) for v in r] for r in rows]
            json.dump(payload, f, sort_keys=True)
            f.write("\n")
        else:
            writer = csv.writer(f)
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_csv_cell(v) for v in row])


def _meta(target):
    if isinstance(target, SpiralParams):
        return {"a": target.a, "mu": target.mu, "g": target.g,
                "theta0": target.theta0}
    return {"a": target.a, "mu": target.mu, "thetas": list(target.thetas),
            "gs": list(target.gs)}


def cmd_solve(args, parser):
    if args.mu is not None or args.g is not None or args.gs is not None:
        parser.error("solve computes mu and g; do not pass them")
    if args.thetas is not None:
        try:
            sol = family_mod.solve_family_matching(args.a, args.thetas)
        except ValueError as exc:
            parser.error(str(exc))
        print(f"a = {_fmt(args.a)}")
        print(f"mu = {_fmt(sol.mu)}")
        for k, g in enumerate(sol.gs):
            print(f"g[{k}] = {_fmt(g)}")
        print(f"residual_norm = {_fmt(sol.residual_norm)}")
        return 0 if sol.residual_norm < args.tol else 1
    mu, g = single_spiral.solve_matching(args.a)
    residual = abs(single_spiral.matching_residual(args.a, mu, g))
    print(f"a = {_fmt(args.a)}")
    print(f"mu = {_fmt(mu)}")
    print(f"g[0] = {_fmt(g)}")
    print(f"residual_norm = {_fmt(residual)}")
    return 0 if residual < args.tol else 1


def cmd_eval(args, parser):
    target = _resolve_target(args, parser)
    zs = np.array(args.points, dtype=complex)
    rows = _eval_chunked(target, zs, args.frame)
    meta = _meta(target)
    meta["frame"] = args.frame
    _write_rows(args, GRID_COLUMNS, rows, meta)
    return 0


def cmd_grid(args, parser):
    target = _resolve_target(args, parser)
    x0, x1, y0, y1 = args.bounds
    nx, ny = args.res
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    gx, gy = np.meshgrid(xs, ys)
    zs = (gx + 1j * gy).ravel()
    rows = _eval_chunked(target, zs, args.frame)
    meta = _meta(target)
    meta["frame"] = args.frame
    meta["bounds"] = list(args.bounds)
    meta["res"] = list(args.res)
    _write_rows(args, GRID_COLUMNS, rows, meta)
    return 0


def cmd_verify(args, parser):
    target = _resolve_target(args, parser)
    reports = verify.default_suite(target, seed=args.seed)
    text = verify.reports_to_json(reports)
    with _open_out(args.out) as f:
        f.write(text)
    for r in reports:
        if r.skipped_reason is not None:
            line = f"{r.name}: SKIP ({r.skipped_reason})"
        else:
            word = "PASS" if r.passed else "FAIL"
            line = f"{r.name}: {word} (max {r.max_abs:.3e}, tol {r.tolerance:.1e})"
        print(line, file=sys.stderr)
    return 0 if all(r.passed for r in reports) else 1


def _advect_velocity(target, zs, t):
    """Batch v(z, t) = t^{mu-1} w(z t^{-mu}); returns (velocity, ok)."""
    mu = target.mu
    scale = t ** (-mu)
    r = np.abs(zs) * scale
    th = np.angle(zs)
    rs = np.where(r > 0, r, 1.0)
    if isinstance(target, SpiralParams):
        _, w, status = _kernels.single_field_batch(
            rs, th, target.a, target.g, target.theta0
        )
    else:
        _, w, status, _ = _kernels.family_field_batch(
            rs, th, target.a, target.thetas, target.gs
        )
    ok = (status == _kernels.STATUS_OK) & (r > 0)
    return t ** (mu - 1.0) * np.where(ok, w, 0.0), ok


def _near_sheet(target, zs, t):
    mu = target.mu
    r = np.abs(zs) * t ** (-mu)
    th = np.angle(zs)
    thetas = ((target.theta0,) if isinstance(target, SpiralParams)
              else target.thetas)
    thr = HALT_DISTANCE * math.sqrt(1.0 + target.a ** 2)
    near = np.zeros(zs.shape, dtype=bool)
    rs = np.where(r > 0, r, 1.0)
    for tk in thetas:
        _, d = _kernels.winding_batch(rs, th, target.a, tk)
        near |= np.abs(d) < thr
    return near | ~(r > 0)


def cmd_advect(args, parser):
    target = _resolve_target(args, parser)
    if not args.t1 > args.t0:
        parser.error("--t1 must exceed --t0")
    z = np.array(args.points, dtype=complex)
    n = len(z)
    flags = [""] * n
    active = ~_near_sheet(target, z, args.t0)
    for k in np.nonzero(~active)[0]:
        flags[k] = "near_sheet"
    rows = []
    t = args.t0

    def emit(indices):
        for k in indices:
            rows.append((t, int(k), z[k].real, z[k].imag, flags[k]))

    emit(range(n))
    while t < args.t1 and np.any(active):
        dt = min(args.dt, args.t1 - t)
        if t + dt == t:
            stuck = np.nonzero(active)[0]
            for k in stuck:
                flags[k] = "dt_underflow"
            active[:] = False
            emit(stuck)
            break
        idx = np.nonzero(active)[0]
        zi = z[idx]
        k1, ok1 = _advect_velocity(target, zi, t)
        k2, ok2 = _advect_velocity(target, zi + 0.5 * dt * k1, t + 0.5 * dt)
        k3, ok3 = _advect_velocity(target, zi + 0.5 * dt * k2, t + 0.5 * dt)
        k4, ok4 = _advect_velocity(target, zi + dt * k3, t + dt)
        ok = ok1 & ok2 & ok3 & ok4
        znew = zi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = t + dt
        near = _near_sheet(target, np.where(ok, znew, zi), t)
        for j, k in enumerate(idx):
            if not ok[j]:
                flags[k] = "near_sheet"
                active[k] = False
            else:
                z[k] = znew[j]
                if near[j]:
                    flags[k] = "near_sheet"
                    active[k] = False
        emit(idx)
    meta = _meta(target)
    meta.update({"t0": args.t0, "t1": args.t1, "dt": args.dt})
    _write_rows(args, ADVECT_COLUMNS, rows, meta)
    return 0


def _add_param_args(sp):
    sp.add_argument("--a", type=_positive, required=True,
                    help="spiral pitch a > 0")
    sp.add_argument("--mu", type=float, default=None,
                    help="similarity exponent (solved if omitted)")
    sp.add_argument("--g", type=float, default=None,
                    help="single-sheet strength (solved if omitted)")
    sp.add_argument("--thetas", type=_float_list, default=None,
                    help="comma-separated family offsets, first must be 0")
    sp.add_argument("--gs", type=_float_list, default=None,
                    help="comma-separated family strengths")


def _add_out_args(sp):
    sp.add_argument("--out", default=None, help="output file (default stdout)")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spiralsheet",
        description="Self-similar spiral vortex sheet fields and checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="solve the matching conditions")
    _add_param_args(sp)
    sp.add_argument("--tol", type=_positive, default=1e-8,
                    help="exit 0 iff residual_norm below this")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("eval", help="evaluate the field at points")
    _add_param_args(sp)
    _add_out_args(sp)
    sp.add_argument("--points", type=_points, required=True,
                    help="semicolon-separated x,y pairs")
    sp.add_argument("--frame", choices=("spiral", "strip"), default="spiral")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("grid", help="sample the field on a grid")
    _add_param_args(sp)
    _add_out_args(sp)
    sp.add_argument("--bounds", type=_bounds, required=True,
                    help="x0,x1,y0,y1")
    sp.add_argument("--res", type=_int_pair, default=[64, 64],
                    help="nx,ny (default 64,64)")
    sp.add_argument("--frame", choices=("spiral", "strip"), default="spiral")
    sp.set_defaults(func=cmd_grid)

    sp = sub.add_parser("verify", help="run the residual battery")
    _add_param_args(sp)
    sp.add_argument("--out", default=None, help="report file (default stdout)")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("advect", help="integrate particle trajectories")
    _add_param_args(sp)
    _add_out_args(sp)
    sp.add_argument("--points", type=_points, required=True)
    sp.add_argument("--t0", type=_positive, default=1.0)
    sp.add_argument("--t1", type=_positive, required=True)
    sp.add_argument("--dt", type=_positive, required=True)
    sp.set_defaults(func=cmd_advect)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except SpiralSheetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
