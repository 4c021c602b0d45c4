"""Periodic points of z**2 + c, their continuation around parameter loops,
monodromy, and the rational 3-curve built from a tracked 3-cycle."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as P

from .core import CircleLoop, FibredMap
from .errors import (AmbiguousMonodromyError, ContinuationError, DegenerateCycleError,
                     DegenerateCurveError)
from .multicurve import MultiCurve, detect_jumping_integer, invariance_residual, lagrange_family

LAMBDA0 = complex(np.exp(2j * np.pi / 3))
NEWTON_TOL = 1e-12
CLUSTER_TOL = 1e-10


def lambda_to_c(lam):
    """c = lam/2 (1 - lam/2): z**2 + c is conjugate to lam z + z**2."""
    lam = np.asarray(lam, dtype=complex)
    out = lam / 2 * (1 - lam / 2)
    return complex(out) if out.ndim == 0 else out


# ------------------------------------------------------------ root finding

def aberth_roots(coeffs, tol: float = 1e-14, max_iter: int = 500) -> np.ndarray:
    """All roots of a polynomial (coefficients highest degree first) by Aberth-Ehrlich iteration."""
    a = np.trim_zeros(np.asarray(coeffs, dtype=complex), "f")
    deg = a.size - 1
    if deg < 1:
        return np.zeros(0, dtype=complex)
    a = a / a[0]
    dp = np.polyder(a)
    # initial guesses on a circle of the Cauchy radius, rotated off the axes
    R = 1 + np.abs(a[1:]).max()
    z = R * 0.5 * np.exp(2j * np.pi * (np.arange(deg) + 0.25) / deg + 0.4j)
    for _ in range(max_iter):
        pz = np.polyval(a, z)
        dz = np.polyval(dp, z)
        ratio = np.where(dz != 0, pz / np.where(dz == 0, 1, dz), pz)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        s = inv.sum(axis=1)
        step = ratio / (1 - ratio * s)
        z = z - step
        if np.abs(step).max() <= tol * max(1.0, np.abs(z).max()):
            break
    return z


def quotient_poly(c: complex, k: int) -> np.ndarray:
    """Coefficients (lowest first) of (p^k(z) - z) / (p(z) - z) for p = z**2 + c."""
    p = np.array([c, 0, 1], dtype=complex)
    it = np.array([0, 1], dtype=complex)
    for _ in range(k):
        it = P.polyadd(P.polymul(it, it), [c])
    g = P.polysub(it, [0, 1])
    q, r = P.polydiv(g, P.polysub(p, [0, 1]))
    return q


def iterate_poly(c, z, k):
    for _ in range(k):
        z = z * z + c
    return z


def orbit_derivative(c, z, k):
    """(p^k)'(z) = prod of 2 z_j along the orbit."""
    d = np.ones_like(np.asarray(z, dtype=complex))
    for _ in range(k):
        d = d * 2 * z
        z = z * z + c
    return d


def _lex_key(z):
    return (round(z.real, 12), round(z.imag, 12))


def _group_cycles(c, roots, k):
    """Split roots into k-cycles by following z -> z**2 + c."""
    roots = list(roots)
    img = [r * r + c for r in roots]
    succ = [int(np.argmin(np.abs(np.asarray(roots) - w))) for w in img]
    if sorted(succ) != list(range(len(roots))):
        raise DegenerateCycleError("orbit following does not permute the periodic points")
    seen, cycles = set(), []
    for i in range(len(roots)):
        if i in seen:
            continue
        cyc = [i]
        seen.add(i)
        j = succ[i]
        while j != i:
            cyc.append(j)
            seen.add(j)
            j = succ[j]
        if len(cyc) != k:
            raise DegenerateCycleError(f"found a cycle of length {len(cyc)} while grouping period {k}")
        pts = [roots[t] for t in cyc]
        start = min(range(k), key=lambda t: _lex_key(pts[t]))
        cycles.append(tuple(complex(pts[(start + t) % k]) for t in range(k)))
    cycles.sort(key=lambda cy: _lex_key(cy[0]))
    return cycles


def periodic_points(c: complex, k: int) -> list:
    """The k-cycles (exact period k) of z**2 + c, each starting at its smallest point."""
    c = complex(c)
    if k == 1:
        r = np.sqrt(0.25 - c + 0j)
        roots = np.array([0.5 + r, 0.5 - r])
    elif k == 2:
        r = np.sqrt(-3 - 4 * c + 0j)
        roots = np.array([(-1 + r) / 2, (-1 - r) / 2])
    elif k == 3:
        q = quotient_poly(c, 3)
        roots = aberth_roots(q[::-1])
        # polish on p^3(z) - z
        for _ in range(3):
            g = iterate_poly(c, roots, 3) - roots
            dg = orbit_derivative(c, roots, 3) - 1
            roots = np.where(dg != 0, roots - g / np.where(dg == 0, 1, dg), roots)
    else:
        raise ValueError("periods 1, 2 and 3 are supported")
    diff = np.abs(roots[:, None] - roots[None, :])
    np.fill_diagonal(diff, np.inf)
    if diff.min() < CLUSTER_TOL:
        raise DegenerateCycleError(f"periodic points of period {k} collide at c={c} (separation {diff.min():.3g})")
    dg = np.abs(orbit_derivative(c, roots, k) - 1)
    if dg.min() < 1e-9:
        raise DegenerateCycleError(f"near-multiple periodic point at c={c} (|(p^k)' - 1| = {dg.min():.3g})")
    if k == 1:
        return [(complex(z),) for z in sorted(roots, key=_lex_key)]
    return _group_cycles(c, roots, k)


# ------------------------------------------------------------ continuation

@dataclass(eq=False)
class CycleTrack:
    k: int
    loop: object
    N: int
    points: np.ndarray          # (N + 1, m): rows over theta_s = s/N, s = 0..N
    monodromy: tuple
    max_newton_residual: float
    cycles: list = field(default_factory=list)   # column groups of the cycles at theta = 0
    substeps: int = 0

    @property
    def thetas(self):
        return np.arange(self.N + 1) / self.N

    def cycle_residual(self) -> float:
        th = self.thetas
        c = self.loop(th)[:, None]
        return float(np.abs(iterate_poly(c, self.points, self.k) - self.points).max())

    def to_json(self):
        return {"k": self.k, "N": self.N, "monodromy": list(self.monodromy),
                "max_newton_residual": self.max_newton_residual, "cycles": self.cycles,
                "columns": int(self.points.shape[1])}


def _newton(c, z, k, max_iter=8, tol=NEWTON_TOL):
    for it in range(max_iter + 1):
        g = iterate_poly(c, z, k) - z
        res = np.abs(g).max()
        if res <= tol:
            return z, res, True
        if it == max_iter:
            break
        dg = orbit_derivative(c, z, k) - 1
        if np.any(dg == 0):
            break
        z = z - g / dg
    return z, np.abs(iterate_poly(c, z, k) - z).max(), False


def _min_sep(z):
    if z.size < 2:
        return np.inf
    d = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(d, np.inf)
    return d.min()


def track_cycle(loop, k: int, N: int = 1024, min_step: Optional[float] = None) -> CycleTrack:
    """Continue every period-k point of z**2 + loop(theta) once around theta in [0, 1]."""
    h0 = 1.0 / N
    hmin = min_step if min_step is not None else 2.0**-20 / N
    cycles = periodic_points(loop(0.0), k)
    start = np.array([z for cy in cycles for z in cy], dtype=complex)
    groups, o = [], 0
    for cy in cycles:
        groups.append(list(range(o, o + len(cy))))
        o += len(cy)
    rows = [start]
    z_prev, z_cur = None, start
    t_prev, t_cur = None, 0.0
    max_res = float(np.abs(iterate_poly(loop(0.0), start, k) - start).max())
    substeps = 0
    for s in range(1, N + 1):
        target = s / N
        h = h0
        while t_cur < target - 1e-15:
            t_new = min(t_cur + h, target)
            if z_prev is not None and t_cur > t_prev:
                pred = z_cur + (z_cur - z_prev) * (t_new - t_cur) / (t_cur - t_prev)
            else:
                pred = z_cur
            z_new, res, ok = _newton(loop(t_new), pred, k)
            ok = ok and np.abs(z_new - z_cur).max() <= 0.25 * _min_sep(z_cur)
            if not ok:
                h = h / 2
                substeps += 1
                if h < hmin:
                    raise ContinuationError(f"continuation step underflow at theta={t_cur:.17g}", t_cur)
                continue
            max_res = max(max_res, float(res))
            z_prev, t_prev, z_cur, t_cur = z_cur, t_cur, z_new, t_new
        t_cur = target
        rows.append(z_cur.copy())
    pts = np.array(rows)
    mono = _match(pts[-1], pts[0])
    return CycleTrack(k, loop, N, pts, mono, max_res, groups, substeps)


def _match(final, initial, ratio: float = 10.0) -> tuple:
    perm = []
    for w in final:
        d = np.abs(initial - w)
        order = np.argsort(d)
        if d.size > 1 and d[order[1]] < ratio * d[order[0]]:
            raise AmbiguousMonodromyError(
                f"monodromy matching not dominant (nearest {d[order[0]]:.3g}, second {d[order[1]]:.3g})")
        perm.append(int(order[0]))
    if sorted(perm) != list(range(len(perm))):
        raise AmbiguousMonodromyError(f"monodromy matching is not a permutation: {perm}")
    return tuple(perm)


def permutation_cycles(perm) -> list:
    seen, out = set(), []
    for i in range(len(perm)):
        if i in seen:
            continue
        cyc = [i]
        seen.add(i)
        j = perm[i]
        while j != i:
            cyc.append(j)
            seen.add(j)
            j = perm[j]
        out.append(cyc)
    return out


def track_to_multicurve(track: CycleTrack, validate: bool = True) -> list:
    """Glue tracked branches along the monodromy into curves, grouped by winding.

    Returns a list of MultiCurves ordered by winding; each length-n cycle of
    the monodromy gives one n-curve component starting at its
    lexicographically smallest point over theta = 0.
    """
    N = track.N
    by_n = {}
    for cyc in permutation_cycles(track.monodromy):
        start = min(range(len(cyc)), key=lambda t: _lex_key(track.points[0, cyc[t]]))
        cyc = cyc[start:] + cyc[:start]
        g = np.concatenate([track.points[:N, j] for j in cyc])
        by_n.setdefault(len(cyc), []).append(g)
    out = []
    for n in sorted(by_n):
        comps = sorted(by_n[n], key=lambda g: _lex_key(g[0]))
        out.append(MultiCurve(comps, n, validate=validate))
    return out


# ----------------------------------------------------------- rational curve

INTERPRETATION_NOTE = ("base map read as (theta, z) -> (theta + alpha, M_theta(z**2 + C(theta))) "
                       "with a theta-dependent Möbius family M_theta")


@dataclass(eq=False)
class Rational3Construction:
    base_map: FibredMap
    curve: MultiCurve
    track: CycleTrack
    tau: Optional[int]
    residual: float
    residuals_by_tau: list
    report: object
    note: str = INTERPRETATION_NOTE

    def to_json(self):
        from .multiplier import classify
        return {"tau": self.tau, "residual": self.residual, "residuals_by_tau": self.residuals_by_tau,
                "monodromy": list(self.track.monodromy), "kappa": self.report.kappa,
                "log_kappa": self.report.log_integral, "classification": classify(self.report),
                "max_newton_residual": self.track.max_newton_residual, "interpretation": self.note}


def build_rational_3curve(loop=None, alpha: float = 0.0, N: int = 1024, radius: float = 1e-4):
    """Möbius post-composition moving the tracked 3-curve along the rotation."""
    from .multiplier import multiplier

    if loop is None:
        loop = CircleLoop(lambda_to_c(LAMBDA0), radius)
    track = track_cycle(loop, 3, N)
    curves = [mc for mc in track_to_multicurve(track) if mc.n == 3]
    if not curves:
        raise DegenerateCurveError(f"monodromy {track.monodromy} has no 3-cycle; the loop does not glue a 3-curve")
    curve = curves[0]
    if curve.p != 1:
        curve = MultiCurve([curve.components[0]], 3)
    post = lagrange_family(curve, alpha, 0)
    F = FibredMap(alpha, loop, post, meta={"construction": "rational3", "note": INTERPRETATION_NOTE})
    res = [invariance_residual(F, curve, t) for t in range(3)]
    tau = detect_jumping_integer(F, curve)
    best = res[tau] if tau is not None else min(res)
    rep = multiplier(F, curve, tau if tau is not None else int(np.argmin(res)))
    return Rational3Construction(F, curve, track, tau, float(best), res, rep)
