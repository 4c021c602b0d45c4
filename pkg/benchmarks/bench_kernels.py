"""Compare compiled and numpy orbit kernels on the workloads the package uses.

    python3 benchmarks/bench_kernels.py [--size 256] [--repeat 3]
"""
import argparse
import time

import numpy as np

import multicurves as mc
from multicurves import kernels
from multicurves.multiplier import _probe_points
from multicurves.render import pixel_grid


def timed(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if kernels.BACKEND != "compiled":
        print("compiled kernels not built; only the numpy fallback is available")
        return

    W = args.size
    julia = mc.FibredMap(0.0, mc.CircleLoop(-0.75 + 0j, 0.0))
    z = pixel_grid(0j, 4.0, W, W).ravel()
    th = np.zeros(z.size)

    cc = mc.canonical_two_curve(0.1, 0.1, 0.1, 4096, 60)
    pth, pz = _probe_points(cc.curve, 0.01, 8)

    cases = {
        f"julia {W}x{W}, 200 iter": (julia, None, th, z, 200, 0.0),
        f"tube probes {pz.size} pts, 2000 iter": (cc.base_map, cc.curve, pth, pz, 2000, 0.005),
    }
    print(f"{'workload':42s} {'compiled':>10s} {'numpy':>10s} {'speedup':>8s}  agree")
    for name, (F, curve, t0, z0, it, thr) in cases.items():
        kernels.tabulate(F)  # tables are cached; time only the orbit loop
        tc, (sc, kc) = timed(lambda: kernels.run_orbits(F, curve, t0, z0, it, 4.0, thr, backend="compiled"), args.repeat)
        tp, (sp, kp) = timed(lambda: kernels.run_orbits(F, curve, t0, z0, it, 4.0, thr, backend="python"), args.repeat)
        agree = np.mean((sc == sp) & (kc == kp))
        print(f"{name:42s} {tc:10.4f} {tp:10.4f} {tp / tc:8.1f}  {agree:.4f}")

    p = pixel_grid(-0.5 + 0j, 3.0, W, W).ravel()
    tc, ec = timed(lambda: kernels.critical_escape(p, 0, 500, 2.0, backend="compiled"), args.repeat)
    tp, ep = timed(lambda: kernels.critical_escape(p, 0, 500, 2.0, backend="python"), args.repeat)
    print(f"{'mandelbrot ' + str(W) + 'x' + str(W) + ', 500 iter':42s} {tc:10.4f} {tp:10.4f} {tp / tc:8.1f}  {np.mean(ec == ep):.4f}")


if __name__ == "__main__":
    main()
