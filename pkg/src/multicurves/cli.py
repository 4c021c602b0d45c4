"""Command-line driver: construct | verify | multiplier | track | render | experiment."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .core import DEFAULT_ALPHA, CircleLoop, FibredMap, Parabolic2Loop
from .cycles import LAMBDA0, build_rational_3curve, lambda_to_c, track_cycle, track_to_multicurve
from .errors import MulticurveError
from .multicurve import MultiCurve, detect_jumping_integer, jumping_residuals
from .multiplier import classify, is_attracted, multiplier, tube_radius
from .quadratic import (build_static_two_curve, canonical_two_curve, post_compose_tau0,
                        tau1_period2)

KINDS = ("static", "tau0", "canonical", "tau1", "rational3")
TOLERANCES = {"static": 1e-12, "tau0": 1e-9, "canonical": 1e-6, "tau1": 1e-9, "rational3": 1e-8}
RECIPE_KEYS = {
    "static": ("eps", "x0", "N"),
    "tau0": ("eps", "x0", "alpha", "N"),
    "canonical": ("eps", "x0", "alpha", "N", "J"),
    "tau1": ("eps", "alpha", "N"),
    "rational3": ("radius", "alpha", "N"),
}


class CLIError(Exception):
    pass


def recipe_from_args(args) -> dict:
    kind = args.kind
    if kind not in KINDS:
        raise CLIError(f"unknown construction kind {kind!r}; choose from {', '.join(KINDS)}")
    rec = {"construction": kind}
    for key in RECIPE_KEYS[kind]:
        val = getattr(args, key)
        if val is None:
            val = {"eps": 0.05 if kind == "tau1" else 0.1, "x0": 0.1, "alpha": DEFAULT_ALPHA,
                   "N": 1024 if kind == "rational3" else 4096, "J": 60, "radius": 1e-4}[key]
        rec[key] = int(val) if key in ("N", "J") else float(val)
    return rec


def build(recipe: dict) -> dict:
    """Run a construction recipe; returns map, curve, expected tau and extra report fields."""
    kind = recipe["construction"]
    extra = {}
    if kind == "static":
        st = build_static_two_curve(recipe["eps"], recipe["x0"], recipe["N"])
        F, curve, tau = st.fibred_map, st.curve, 0
        extra["fixed_point_residual"] = st.fixed_point_residual()
    elif kind == "tau0":
        c = post_compose_tau0(recipe["eps"], recipe["x0"], recipe["alpha"], recipe["N"])
        F, curve, tau = c.base_map, c.curve, 0
    elif kind == "canonical":
        c = canonical_two_curve(recipe["eps"], recipe["x0"], recipe["alpha"], recipe["N"], recipe["J"])
        F, curve, tau = c.base_map, c.curve, 0
        extra.update(convention=c.convention, residuals_by_convention=c.residuals,
                     normalization_residual=c.normalization.residual,
                     winding_about_quarter=c.winding_about_quarter, log_integrals=c.log_integrals)
    elif kind == "tau1":
        c = tau1_period2(recipe["eps"], recipe["alpha"], recipe["N"])
        F, curve, tau = c.base_map, c.curve, 1
        extra["static_swap_residual"] = c.static_swap_residual
    elif kind == "rational3":
        loop = CircleLoop(lambda_to_c(LAMBDA0), recipe["radius"])
        c = build_rational_3curve(loop, recipe["alpha"], recipe["N"])
        F, curve = c.base_map, c.curve
        tau = c.tau if c.tau is not None else 1
        extra.update(monodromy=list(c.track.monodromy), max_newton_residual=c.track.max_newton_residual,
                     interpretation=c.note)
    else:
        raise CLIError(f"unknown construction {kind!r}")
    return {"map": F, "curve": curve, "tau": tau, "extra": extra}


def analyse(F: FibredMap, curve: MultiCurve, expected_tau: int, tol: float) -> dict:
    res = jumping_residuals(F, curve)
    errors = []
    try:
        tau = detect_jumping_integer(F, curve)
    except MulticurveError as exc:
        tau = None
        errors.append(str(exc))
    rep = multiplier(F, curve, expected_tau)
    out = {
        "tau": tau, "expected_tau": expected_tau, "residual": res[expected_tau],
        "residuals_by_tau": res, "tolerance": tol, "kappa": rep.kappa, "log_kappa": rep.log_integral,
        "classification": classify(rep), "N": curve.M, "n": curve.n, "p": curve.p,
        "singularity_flags": rep.singularity_flags,
    }
    if res[expected_tau] > tol:
        errors.append(f"invariance residual {res[expected_tau]:.6g} exceeds tolerance {tol:g}")
    if tau != expected_tau:
        errors.append(f"detected jumping integer {tau} differs from expected {expected_tau}")
    out["ok"] = not errors
    out["errors"] = errors
    return out


def write_outputs(out_dir, stem, curve, recipe, report):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv = out_dir / f"{stem}.csv"
    io.write_curve(csv, curve, recipe)
    rp = out_dir / f"{stem}_report.json"
    io.write_json(rp, report)
    return csv, rp


# -------------------------------------------------------------- commands

def cmd_construct(args):
    recipe = recipe_from_args(args)
    b = build(recipe)
    tol = args.tol if args.tol is not None else TOLERANCES[recipe["construction"]]
    report = {"schema": io.SCHEMA, "recipe": recipe, **analyse(b["map"], b["curve"], b["tau"], tol), **b["extra"]}
    csv, rp = write_outputs(args.out_dir, args.stem or recipe["construction"], b["curve"], recipe, report)
    print(io.dumps({"curve": str(csv), "report": str(rp), "classification": report["classification"],
                    "tau": report["tau"], "residual": report["residual"], "kappa": report["kappa"]}), end="")
    return 0 if report["ok"] else 1


def _load_for_check(args):
    curve, meta = io.read_curve(args.curve, validate=False)
    recipe = dict(meta.get("recipe") or {})
    if args.kind is not None:
        recipe = recipe_from_args(args)
    else:
        for key in ("eps", "x0", "alpha", "N", "J", "radius"):
            if getattr(args, key, None) is not None:
                recipe[key] = getattr(args, key)
    if "construction" not in recipe:
        raise CLIError("no construction recipe in the sidecar; pass --kind and its parameters")
    b = build(recipe)
    return curve, recipe, b


def cmd_verify(args):
    curve, recipe, b = _load_for_check(args)
    tol = args.tol if args.tol is not None else TOLERANCES[recipe["construction"]]
    if curve.M != b["curve"].M or curve.n != b["curve"].n:
        raise CLIError(f"curve grid (N={curve.M}, n={curve.n}) does not match the recipe")
    report = {"schema": io.SCHEMA, "recipe": recipe, **analyse(b["map"], curve, b["tau"], tol)}
    try:
        curve.check()
        report["curve_valid"] = True
    except MulticurveError as exc:
        report["curve_valid"] = False
        report["errors"].append(f"curve check: {exc}")
        report["ok"] = False
    text = io.dumps(report)
    if args.out:
        Path(args.out).write_text(text)
    print(text, end="")
    return 0 if report["ok"] else 1


def cmd_multiplier(args):
    curve, recipe, b = _load_for_check(args)
    tau = args.tau if args.tau is not None else b["tau"]
    rep = multiplier(b["map"], curve, tau)
    out = {"schema": io.SCHEMA, "recipe": recipe, "tau": tau, **rep.to_json(), "classification": classify(rep)}
    print(io.dumps(out), end="")
    return 0


def _loop_from_args(args):
    if args.loop == "parabolic2":
        eps = 0.1 if args.eps is None else args.eps
        x0 = 0.1 if args.x0 is None else args.x0
        return Parabolic2Loop(eps, x0)
    if args.center == "lambda0":
        c0 = lambda_to_c(LAMBDA0)
    else:
        c0 = complex(args.center.replace(" ", "")) if args.center else 0j
    r = 0.01 if args.radius is None else args.radius
    return CircleLoop(c0, r)


def cmd_track(args):
    loop = _loop_from_args(args)
    N = 1024 if args.N is None else int(args.N)
    tr = track_cycle(loop, args.k, N)
    curves = track_to_multicurve(tr)
    out = {"schema": io.SCHEMA, **tr.to_json(), "cycle_residual": tr.cycle_residual(),
           "curves": [{"n": c.n, "p": c.p} for c in curves]}
    if args.out:
        io.write_track(args.out, tr)
    print(io.dumps(out), end="")
    return 0


def cmd_render(args):
    from .render import render_fiber_slice, render_parameter_space

    center = complex(args.center_re, args.center_im)
    if args.mode in ("mandelbrot_c", "lambda"):
        img = render_parameter_space(args.mode, center, args.width, args.W, args.H, args.max_iter,
                                     2.0 if args.escape_radius is None else args.escape_radius)
    else:
        if args.kind in KINDS:
            b = build(recipe_from_args(args))
            F, curve, tau = b["map"], b["curve"], b["tau"]
        else:
            F, curve, tau = FibredMap(0.0 if args.alpha is None else args.alpha, _loop_from_args(args)), None, 0
        tube = None
        if args.mode in ("basin", "tube") and curve is not None:
            tube = args.tube_radius
            if tube is None:
                tube = tube_radius(F, curve, tau, args.budget, stride=args.stride).radius
        img = render_fiber_slice(F, args.theta, args.mode, center, args.width, args.W, args.H,
                                 args.max_iter, 4.0 if args.escape_radius is None else args.escape_radius,
                                 curve, tau, args.static, tube, args.delta)
    io.write_image(args.out, img)
    print(io.dumps({"image": args.out, "width": args.W, "height": args.H}), end="")
    return 0


def _exp_monodromy(N):
    a = track_cycle(Parabolic2Loop(0.1, 0.1), 1, N)
    b = track_cycle(CircleLoop(0j, 0.01), 1, N)
    return {"parabolic2": {"monodromy": list(a.monodromy), "max_newton_residual": a.max_newton_residual},
            "circle_at_0": {"monodromy": list(b.monodromy), "max_newton_residual": b.max_newton_residual}}


def _exp_three_cycle(N, alpha, radius):
    c = build_rational_3curve(CircleLoop(lambda_to_c(LAMBDA0), radius), alpha, N)
    return c.to_json()


def _exp_tube(alpha, budget, stride, seed=0):
    c = canonical_two_curve(0.1, 0.1, alpha, 4096, 60)
    t = tube_radius(c.base_map, c.curve, 0, budget, stride=stride)
    rng = np.random.default_rng(seed)
    th = rng.random(64)
    fib = np.stack([c.curve.fiber(x).ravel()[rng.integers(2)] for x in th])
    rad = t.radius * np.sqrt(rng.random(64))
    z = fib + rad * np.exp(2j * np.pi * rng.random(64))
    att = [bool(is_attracted(c.base_map, (x, w), c.curve, budget, t.radius, t)) for x, w in zip(th, z)]
    far = [is_attracted(c.base_map, (x, 10 * np.exp(2j * np.pi * s)), c.curve, budget, t.radius, t).status
           for x, s in zip(th, rng.random(64))]
    return {"alpha": alpha, "tube": t.to_json(), "attracted": int(sum(att)), "probes": 64,
            "far_escaped": int(sum(s == "escaped" for s in far))}


def cmd_experiment(args):
    alpha = DEFAULT_ALPHA if args.alpha is None else args.alpha
    N = 1024 if args.N is None else int(args.N)
    names = ["monodromy", "three_cycle", "tube"] if args.name == "all" else [args.name]
    out = {"schema": io.SCHEMA}
    for name in names:
        if name == "monodromy":
            out[name] = _exp_monodromy(N)
        elif name == "three_cycle":
            out[name] = _exp_three_cycle(N, alpha, 1e-4 if args.radius is None else args.radius)
        elif name == "tube":
            out[name] = _exp_tube(0.1 if args.alpha is None else alpha, args.budget, args.stride)
        else:
            raise CLIError(f"unknown experiment {name!r}")
    text = io.dumps(out)
    if args.out:
        Path(args.out).write_text(text)
    print(text, end="")
    return 0


# ---------------------------------------------------------------- parser

def _recipe_flags(p):
    p.add_argument("--kind", choices=KINDS + ("loop",), default=None)
    p.add_argument("--eps", type=float)
    p.add_argument("--x0", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--N", type=int)
    p.add_argument("--J", type=int)
    p.add_argument("--radius", type=float)
    p.add_argument("--tol", type=float)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="multicurves", description=__doc__)
    ap.add_argument("--config", help="JSON file whose keys override command-line flags")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a curve and write CSV + report")
    _recipe_flags(p)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--stem")
    p.set_defaults(func=cmd_construct)

    for name, func in (("verify", cmd_verify), ("multiplier", cmd_multiplier)):
        p = sub.add_parser(name)
        p.add_argument("curve")
        _recipe_flags(p)
        p.add_argument("--tau", type=int)
        p.add_argument("--out")
        p.set_defaults(func=func)

    p = sub.add_parser("track", help="continue periodic points around a parameter loop")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--loop", choices=("circle", "parabolic2"), default="circle")
    p.add_argument("--center", default=None, help="complex center, or 'lambda0'")
    p.add_argument("--radius", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--x0", type=float)
    p.add_argument("--N", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("render", help="escape-time and basin images")
    p.add_argument("--mode", choices=("julia", "basin", "tube", "mandelbrot_c", "lambda"), default="julia")
    _recipe_flags(p)
    p.add_argument("--loop", choices=("circle", "parabolic2"), default="circle")
    p.add_argument("--center", default=None, help="loop center for --kind loop")
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--center-re", type=float, default=0.0)
    p.add_argument("--center-im", type=float, default=0.0)
    p.add_argument("--width", type=float, default=4.0)
    p.add_argument("--W", type=int, default=256)
    p.add_argument("--H", type=int, default=256)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--escape-radius", type=float)
    p.add_argument("--static", action="store_true")
    p.add_argument("--tube-radius", type=float)
    p.add_argument("--delta", type=float, default=1e-3)
    p.add_argument("--budget", type=int, default=2000)
    p.add_argument("--stride", type=int, default=16)
    p.add_argument("--out", default="render.ppm")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("experiment", help="named numerical experiments")
    p.add_argument("name", choices=("monodromy", "three_cycle", "tube", "all"))
    p.add_argument("--alpha", type=float)
    p.add_argument("--N", type=int)
    p.add_argument("--radius", type=float)
    p.add_argument("--budget", type=int, default=2000)
    p.add_argument("--stride", type=int, default=16)
    p.add_argument("--out")
    p.set_defaults(func=cmd_experiment)
    return ap


def apply_config(args, path):
    cfg = json.loads(Path(path).read_text())
    if not isinstance(cfg, dict):
        raise CLIError("config file must hold a JSON object")
    for key, val in cfg.items():
        dest = "kind" if key == "construction" else key.replace("-", "_")
        setattr(args, dest, val)
    return args


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.config:
            apply_config(args, args.config)
        return args.func(args)
    except (CLIError, MulticurveError, ValueError, OSError, KeyError) as exc:
        err = {"ok": False, "error": type(exc).__name__, "message": str(exc)}
        print(io.dumps(err), end="", file=sys.stderr)
        return 2 if isinstance(exc, CLIError) else 1


if __name__ == "__main__":
    sys.exit(main())
