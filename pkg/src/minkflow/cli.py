"""Command-line front end.

Subcommands: evolve, selfsim, classify, verify, catalog, invariant, plot.
Outputs (CSV/JSON/SVG) are deterministic: identical configurations give
byte-identical files.  Exit codes: 0 success, 2 validation error,
3 numerical failure, 4 unknown name.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import sympy as sp

from . import catalog, flow, geometry, invariants, selfsim, svg
from .errors import InvalidParams, MinkflowError, UnknownSolution
from .flow import Dirichlet, FlowGrid, FlowKind
from .hyperbolic import HyperbolicNumber
from .selfsim import Chart, SolitonParams

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_UNKNOWN = 0, 2, 3, 4

_ALLOWED_FUNCS = {"sin", "cos", "tan", "sinh", "cosh", "tanh", "exp",
                  "log", "sqrt", "asin", "acos", "atan", "asinh", "acosh",
                  "atanh", "coth", "Abs"}


def _atomic_write(path: str, data: str):
    d = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".minkflow-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _json_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _config_hash(cfg: dict) -> str:
    return hashlib.sha256(
        json.dumps(cfg, sort_keys=True).encode()).hexdigest()[:16]


def _parse_expr(text: str, var_name: str):
    """Closed-form sampler restricted to the fixed function basis."""
    u = sp.Symbol(var_name, real=True)
    t = sp.Symbol("t", real=True)
    expr = sp.sympify(text, locals={var_name: u, "t": t, "coth": sp.coth})
    bad = [f.func.__name__ for f in expr.atoms(sp.Function)
           if f.func.__name__ not in _ALLOWED_FUNCS]
    if bad:
        raise InvalidParams(
            f"functions {sorted(set(bad))} are outside the supported basis")
    free = expr.free_symbols - {u, t}
    if free:
        raise InvalidParams(f"unknown symbols in expression: {free}")
    return flow.ClosedForm(expr, u, t, name=text)


def _initial_grid(args) -> tuple[FlowGrid, object]:
    """Build the starting grid and a boundary policy from --initial."""
    spec = args.initial
    window = (args.window[0], args.window[1])
    n = int(round((window[1] - window[0]) / args.dx)) + 1
    nodes = np.linspace(window[0], window[1], n)
    if spec.startswith("csv:"):
        curve = geometry.read_curve_csv(spec[4:])
        kind = FlowKind(args.kind)
        if kind is FlowKind.GRAPH_Y:
            vals = np.interp(nodes, curve.x, curve.y)
        else:
            order = np.argsort(curve.eta)
            vals = np.interp(nodes, curve.eta[order], curve.xi[order])
        return FlowGrid(kind, nodes, vals, args.t0), None
    if spec.startswith("expr:"):
        kind = FlowKind(args.kind)
        var = "x" if kind is FlowKind.GRAPH_Y else "eta"
        form = _parse_expr(spec[5:], var)
        grid = FlowGrid(kind, nodes, form(nodes, args.t0), args.t0)
        bc = Dirichlet(lambda t: float(form(nodes[0], t)),
                       lambda t: float(form(nodes[-1], t)))
        return grid, bc
    entry = catalog.get(spec)
    grid = FlowGrid(entry.kind, nodes, entry.sampler(nodes, args.t0), args.t0)
    bc = Dirichlet(lambda t: float(entry.sampler(nodes[0], t)),
                   lambda t: float(entry.sampler(nodes[-1], t)))
    return grid, bc


def cmd_evolve(args) -> int:
    cfg = {"cmd": "evolve", "initial": args.initial, "t0": args.t0,
           "t1": args.t1, "dx": args.dx, "window": list(args.window),
           "snapshots": args.snapshots, "kind": args.kind,
           "boundary": args.boundary}
    grid, bc = _initial_grid(args)
    if args.boundary == "frozen":
        bc = None
    if args.dt is not None:
        bound = flow.stability_dt(grid)
        if args.dt > bound * (1.0 + 1e-9):
            from .errors import StabilityViolation
            raise StabilityViolation(
                f"requested dt={args.dt:g} exceeds the stability bound "
                f"{bound:.3e} of the initial grid")
    every = (args.t1 - grid.t) / max(1, args.snapshots - 1) \
        if args.snapshots > 1 else None
    snaps = flow.evolve(grid, args.t1, snapshot_every=every, boundary=bc,
                        max_dt=args.dt)
    os.makedirs(args.out, exist_ok=True)
    curves = []
    for i, g in enumerate(snaps):
        rows = [f"# t={g.t:.17g}", "node,value"]
        rows += [f"{u:.17g},{v:.17g}" for u, v in zip(g.nodes, g.values)]
        _atomic_write(os.path.join(args.out, f"snapshot_{i:03d}.csv"),
                      "\n".join(rows) + "\n")
        if g.kind is FlowKind.GRAPH_Y:
            curves.append(np.column_stack([g.nodes, g.values]))
        else:
            curves.append(np.column_stack([(g.values + g.nodes) / 2.0,
                                           (g.values - g.nodes) / 2.0]))
    doc = svg.render(curves, labels=[f"t={g.t:.6g}" for g in snaps],
                     config_hash=_config_hash(cfg), title=args.initial)
    _atomic_write(os.path.join(args.out, "evolve.svg"), doc)
    print(f"wrote {len(snaps)} snapshots to {args.out}")
    return EXIT_OK


def _soliton_params(args) -> SolitonParams:
    cx, cy = (float(v) for v in args.C.split(","))
    if args.C_basis == "diagonal":
        C = HyperbolicNumber.from_diagonal(cx, cy)
    else:
        C = HyperbolicNumber(cx, cy)
    return SolitonParams(args.a, args.b, C)


def _run_trajectory(args):
    p = _soliton_params(args)
    init = tuple(float(v) for v in args.init.split(","))
    chart = Chart.TAU_NU if args.chart == "taunu" else Chart.KL
    traj = selfsim.integrate_phase(p, chart, init, s_max=args.s_max,
                                   method=args.method)
    return p, traj


def cmd_selfsim(args) -> int:
    p, traj = _run_trajectory(args)
    os.makedirs(args.out, exist_ok=True)
    rows = ["s,tau,nu,theta,k,l"]
    rows += [",".join(f"{v:.17g}" for v in vals) for vals in
             zip(traj.s, traj.tau, traj.nu, traj.theta, traj.k, traj.l)]
    _atomic_write(os.path.join(args.out, "trajectory.csv"),
                  "\n".join(rows) + "\n")
    _atomic_write(os.path.join(args.out, "events.json"),
                  _json_dumps(traj.events))
    curve = selfsim.reconstruct(traj)
    geometry.write_curve_csv(curve, os.path.join(args.out, "curve.csv"))
    report = selfsim.classify(p, traj)
    _atomic_write(os.path.join(args.out, "classification.json"),
                  _json_dumps(report.to_json_dict()))
    print(f"trajectory, curve and classification written to {args.out}")
    return EXIT_OK


def cmd_classify(args) -> int:
    p, traj = _run_trajectory(args)
    report = selfsim.classify(p, traj)
    text = _json_dumps(report.to_json_dict())
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _atomic_write(os.path.join(args.out, "classification.json"), text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    names = catalog.names() if args.all else (args.names or "").split(",")
    names = [n for n in names if n]
    if not names:
        raise InvalidParams("pass --all or --names")
    order_tol = args.tol if args.tol is not None else catalog.ORDER_TOL

    def one(name):
        return catalog.verify_all(only=[name], order_tol=order_tol)[0]

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as ex:
            results = list(ex.map(one, names))
    else:
        results = [one(n) for n in names]
    payload = [{"name": r["name"], "passed": r["passed"],
                "report": r["report"].to_json_dict()} for r in results]
    text = _json_dumps(payload)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _atomic_write(os.path.join(args.out, "verify.json"), text)
    for r in payload:
        order = r["report"]["observed_order"]
        print(f"{r['name']:<20} order={order if order is None else round(order, 3)} "
              f"{'PASS' if r['passed'] else 'FAIL'}")
    return EXIT_OK if all(r["passed"] for r in payload) else EXIT_NUMERICAL


def cmd_catalog(args) -> int:
    if args.action == "list":
        for name in catalog.names():
            e = catalog.get(name)
            print(f"{name:<20} {e.plane.value:<10} {e.kind.value:<16} "
                  f"t in ({e.t_domain[0]:g}, {e.t_domain[1]:g})")
        return EXIT_OK
    if args.action == "show":
        e = catalog.get(args.name)
        info = {"name": e.name, "plane": e.plane.value, "kind": e.kind.value,
                "t_domain": [e.t_domain[0], e.t_domain[1]],
                "expression": str(e.form.expr),
                "curvature_profile": None if e.curvature_profile is None
                else str(e.curvature_profile.form.expr),
                "finite_length": e.finite_length, "notes": e.notes,
                "wick_partner": e.wick_partner}
        sys.stdout.write(_json_dumps(info))
        return EXIT_OK
    if args.action == "verify":
        args.all, args.names = True, None
        return cmd_verify(args)
    if args.action == "lengths":
        labels = (list(catalog.LENGTH_SERIES) if args.all or not args.name
                  else [lb for lb, (nm, _) in catalog.LENGTH_SERIES.items()
                        if nm == args.name])
        if not labels:
            raise UnknownSolution(f"{args.name} has no finite-length series")
        rows = ["series,name,t,length"]
        for lb in labels:
            name, _ = catalog.LENGTH_SERIES[lb]
            lo, hi = catalog.LENGTH_GRIDS[lb]
            series = catalog.length_vs_time(
                name, np.linspace(lo, hi, args.points))
            rows += [f"{lb},{name},{t:.17g},{val:.17g}" for t, val in series]
        text = "\n".join(rows) + "\n"
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            _atomic_write(os.path.join(args.out, "lengths.csv"), text)
            print(f"wrote {os.path.join(args.out, 'lengths.csv')}")
        else:
            sys.stdout.write(text)
        return EXIT_OK
    raise InvalidParams(f"unknown catalog action {args.action}")


_INVARIANT_MOTIONS = {
    "line": lambda: selfsim.MotionLaw(
        lambda t: 0.0, lambda t: 1.0 + t,
        lambda t: HyperbolicNumber(0.0, 0.0), (-1.0, math.inf)),
    "hyperbola": lambda: selfsim.MotionLaw(
        lambda t: t, lambda t: 1.0,
        lambda t: HyperbolicNumber(0.0, 0.0), (-math.inf, math.inf)),
    "mink-log-spiral": None,  # built per alpha below
    "exp-diagonal": lambda: selfsim.MotionLaw(
        lambda t: t, lambda t: math.exp(t),
        lambda t: HyperbolicNumber.from_diagonal(0.0, t),
        (-math.inf, math.inf)),
}


def _invariant_setup(args):
    kind = invariants.InvariantKind(args.kind)
    params = json.loads(args.params) if args.params else {}
    spec = invariants.InvariantCurveSpec(kind, params)
    span = tuple(args.span)
    curve = invariants.make_invariant_curve(spec, span, n=args.n)
    if kind is invariants.InvariantKind.MINK_LOG_SPIRAL:
        alpha = params["alpha"]
        motion = selfsim.MotionLaw(
            lambda t: alpha * math.log(1.0 + t), lambda t: 1.0 + t,
            lambda t: HyperbolicNumber(0.0, 0.0), (-1.0, math.inf))
    else:
        maker = _INVARIANT_MOTIONS.get(kind.value)
        motion = maker() if maker else None
    return curve, motion


def cmd_invariant(args) -> int:
    curve, motion = _invariant_setup(args)
    if args.action == "make":
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, f"invariant-{args.kind}.csv")
        geometry.write_curve_csv(curve, path)
        print(f"wrote {path}")
        return EXIT_OK
    if motion is None:
        raise InvalidParams(f"no canonical motion for kind {args.kind}")
    t_probe = [float(v) for v in args.t_probe.split(",")]
    dev = invariants.check_invariance(curve, motion, t_probe,
                                      probe_fraction=tuple(args.probe_fraction))
    tol = args.tol if args.tol is not None else 1e-8
    payload = {"kind": args.kind, "t_probe": t_probe, "deviation": dev,
               "tolerance": tol, "passed": bool(dev <= tol)}
    text = _json_dumps(payload)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _atomic_write(os.path.join(args.out, "invariance.json"), text)
    sys.stdout.write(text)
    return EXIT_OK if payload["passed"] else EXIT_NUMERICAL


def cmd_plot(args) -> int:
    curves, labels = [], []
    for path in args.csv:
        curve = geometry.read_curve_csv(path)
        curves.append(curve.points)
        labels.append(os.path.basename(path))
    cfg = {"cmd": "plot", "inputs": [os.path.basename(p) for p in args.csv]}
    doc = svg.render(curves, labels=labels, config_hash=_config_hash(cfg))
    _atomic_write(args.out_file, doc)
    print(f"wrote {args.out_file}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="minkflow",
        description="curvature flow of space-like curves in the "
                    "split-signature plane")
    ap.add_argument("--config", help="JSON file with defaults for the "
                                     "chosen subcommand")
    ap.add_argument("--out", default="out", help="output directory")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--tol", type=float, default=None,
                    help="tolerance override where the subcommand uses one")
    # The global flags are accepted after the subcommand as well; the
    # SUPPRESS defaults keep them from clobbering values parsed earlier.
    common = argparse.ArgumentParser(add_help=False)
    for flag, kw in (("--config", {}), ("--out", {}),
                     ("--jobs", {"type": int}), ("--tol", {"type": float})):
        common.add_argument(flag, default=argparse.SUPPRESS, **kw)
    sub = ap.add_subparsers(dest="command", required=True,
                            parser_class=lambda **kw: argparse.ArgumentParser(
                                parents=[common], **kw))

    ev = sub.add_parser("evolve", help="run the flow from an initial curve")
    ev.add_argument("initial",
                    help="catalog name, csv:PATH, or expr:FORMULA")
    ev.add_argument("--kind", default="graph_y",
                    choices=[k.value for k in FlowKind])
    ev.add_argument("--t0", type=float, default=0.0)
    ev.add_argument("--t1", type=float, required=True)
    ev.add_argument("--dx", type=float, default=0.01)
    ev.add_argument("--dt", type=float, default=None,
                    help="explicit step (checked against stability)")
    ev.add_argument("--window", type=float, nargs=2, default=(-2.0, 2.0))
    ev.add_argument("--snapshots", type=int, default=4)
    ev.add_argument("--boundary", default="exact",
                    choices=("exact", "frozen"))
    ev.set_defaults(func=cmd_evolve)

    for name, fn in (("selfsim", cmd_selfsim), ("classify", cmd_classify)):
        sp_ = sub.add_parser(name, help=f"{name} a soliton trajectory")
        sp_.add_argument("--a", type=float, required=True)
        sp_.add_argument("--b", type=float, required=True)
        sp_.add_argument("--C", default="0,0")
        sp_.add_argument("--C-basis", default="standard",
                         choices=("standard", "diagonal"))
        sp_.add_argument("--chart", default="taunu", choices=("taunu", "kl"))
        sp_.add_argument("--init", default="0,-1")
        sp_.add_argument("--s-max", type=float, default=20.0)
        sp_.add_argument("--method", default="DOP853")
        sp_.set_defaults(func=fn)

    ve = sub.add_parser("verify", help="residual-verify catalog entries")
    ve.add_argument("--all", action="store_true")
    ve.add_argument("--names")
    ve.set_defaults(func=cmd_verify)

    ca = sub.add_parser("catalog", help="query the exact-solution registry")
    ca.add_argument("action",
                    choices=("list", "show", "verify", "lengths"))
    ca.add_argument("name", nargs="?")
    ca.add_argument("--all", action="store_true")
    ca.add_argument("--points", type=int, default=50)
    ca.set_defaults(func=cmd_catalog)

    iv = sub.add_parser("invariant", help="invariant-curve tools")
    iv.add_argument("action", choices=("make", "check"))
    iv.add_argument("--kind", required=True,
                    choices=[k.value for k in invariants.InvariantKind])
    iv.add_argument("--params", help="JSON dict of kind parameters")
    iv.add_argument("--span", type=float, nargs=2, default=(0.1, 8.0))
    iv.add_argument("--n", type=int, default=20001)
    iv.add_argument("--t-probe", default="0.1,0.5,1.0")
    iv.add_argument("--probe-fraction", type=float, nargs=2,
                    default=(0.15, 0.85))
    iv.set_defaults(func=cmd_invariant)

    pl = sub.add_parser("plot", help="overlay curve CSVs as SVG")
    pl.add_argument("csv", nargs="+")
    pl.add_argument("--out-file", default="plot.svg")
    pl.set_defaults(func=cmd_plot)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.config:
        with open(args.config) as fh:
            defaults = json.load(fh)
        for key, val in defaults.items():
            attr = key.replace("-", "_")
            if hasattr(args, attr):
                setattr(args, attr, val)
    try:
        return args.func(args)
    except UnknownSolution as exc:
        print(f"UnknownSolution: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    except (InvalidParams, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except MinkflowError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
