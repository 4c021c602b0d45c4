"""Orbit kernels: compiled extension when available, numpy fallback otherwise.

Set MULTICURVE_PURE_PYTHON=1 to force the fallback. MULTICURVE_THREADS caps
the number of worker threads used to split large point batches.
"""
from __future__ import annotations

import os
import weakref
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _fallback

_compiled = None
if os.environ.get("MULTICURVE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"
DENSE_LOOP_GRID = 1 << 16

_STATUS = {0: "budget-exhausted", 1: "escaped", 2: "attracted"}
_TABLES = weakref.WeakKeyDictionary()


def backend_module(name: str | None = None):
    name = name or BACKEND
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return _compiled
    return _fallback


def n_threads() -> int:
    try:
        return max(1, int(os.environ.get("MULTICURVE_THREADS", "1")))
    except ValueError:
        return 1


def _ri(z):
    z = np.asarray(z, dtype=complex)
    return np.ascontiguousarray(np.stack([z.real, z.imag], axis=-1))


def tabulate(F) -> dict:
    """Flatten a FibredMap into kernel tables (cached per map object).

    Circle loops stay closed-form; sampled loops are used as given and
    other loops are tabulated on a dense grid.
    """
    try:
        return _TABLES[F]
    except (KeyError, TypeError):
        pass
    out = _tabulate(F)
    try:
        _TABLES[F] = out
    except TypeError:
        pass
    return out


def _tabulate(F) -> dict:
    loop = F.loop
    out = {"alpha": float(F.alpha), "loop_mode": 0, "c0r": 0.0, "c0i": 0.0, "rad": 0.0,
           "ltab": np.zeros((1, 2)), "post_mode": 0, "ptab": np.zeros((1, 8))}
    if loop is not None:
        if hasattr(loop, "as_circle"):
            c0, r = loop.as_circle()
            out.update(loop_mode=1, c0r=float(np.real(c0)), c0i=float(np.imag(c0)), rad=float(r))
        elif getattr(loop, "kind", "") == "sampled":
            out.update(loop_mode=2, ltab=_ri(loop.values))
        else:
            th = np.arange(DENSE_LOOP_GRID) / DENSE_LOOP_GRID
            out.update(loop_mode=2, ltab=_ri(loop(th)))
    post = F.post
    if post is not None:
        tab = post.table()
        if post.kind == "affine":
            ptab = np.zeros((tab.shape[0], 8))
            ptab[:, 0], ptab[:, 1] = tab[:, 0].real, tab[:, 0].imag
            ptab[:, 2], ptab[:, 3] = tab[:, 1].real, tab[:, 1].imag
            out.update(post_mode=1, ptab=ptab)
        else:
            out.update(post_mode=2, ptab=np.ascontiguousarray(_ri(tab).reshape(tab.shape[0], 8)))
    return out


def _curve_table(curve):
    if curve is None:
        return np.zeros((0, 1, 2)), 1
    arr = np.stack(curve.components)
    return np.ascontiguousarray(_ri(arr)), int(curve.n)


def run_orbits(F, curve, theta, z, max_iter, escape_radius, threshold=0.0,
               stop_on_failure=False, backend=None, tables=None):
    """Iterate the fibred map from many starting points.

    Returns (status, steps): status 0 = budget exhausted, 1 = escaped,
    2 = reached fiber distance < threshold of the curve. With
    stop_on_failure the sweep ends at the first escape, leaving the
    remaining points at status 0.
    """
    mod = backend_module(backend)
    tb = tables or tabulate(F)
    theta = np.ascontiguousarray(np.asarray(theta, dtype=float).ravel())
    z = np.asarray(z, dtype=complex).ravel()
    zr = np.ascontiguousarray(z.real)
    zi = np.ascontiguousarray(z.imag)
    thr = np.ascontiguousarray(np.broadcast_to(np.asarray(threshold, dtype=float), theta.shape))
    ctab, n = _curve_table(curve)

    def job(sl):
        return mod.run_orbits(theta[sl], zr[sl], zi[sl], tb["alpha"], tb["loop_mode"], tb["c0r"],
                              tb["c0i"], tb["rad"], tb["ltab"], tb["post_mode"], tb["ptab"],
                              int(max_iter), float(escape_radius), ctab, n, thr[sl],
                              bool(stop_on_failure))

    nt = n_threads()
    P = theta.size
    if nt == 1 or P < 4096:
        return job(slice(0, P))
    bounds = np.linspace(0, P, nt + 1).astype(int)
    with ThreadPoolExecutor(nt) as ex:
        parts = list(ex.map(job, [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:])]))
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def critical_escape(params, kind: int, max_iter: int, escape_radius: float, backend=None):
    mod = backend_module(backend)
    p = np.asarray(params, dtype=complex).ravel()
    pr = np.ascontiguousarray(p.real)
    pi_ = np.ascontiguousarray(p.imag)
    nt = n_threads()
    if nt == 1 or p.size < 4096:
        return mod.critical_escape(pr, pi_, int(kind), int(max_iter), float(escape_radius))
    bounds = np.linspace(0, p.size, nt + 1).astype(int)
    with ThreadPoolExecutor(nt) as ex:
        parts = list(ex.map(lambda ab: mod.critical_escape(pr[ab[0]:ab[1]], pi_[ab[0]:ab[1]], int(kind),
                                                           int(max_iter), float(escape_radius)),
                            list(zip(bounds[:-1], bounds[1:]))))
    return np.concatenate(parts)
