"""Pure numpy twin of the compiled kernels (same signatures and semantics).

Orbits are advanced in lockstep over the still-active points.
"""
import numpy as np

TWO_PI = 6.283185307179586


def _wrap(t):
    t = t - np.floor(t)
    return np.where(t >= 1.0, 0.0, t)


def _locate(t, K):
    s = t * K
    i = np.floor(s)
    f = s - i
    snap = np.abs(f - np.rint(f)) < 1e-9
    i = np.where(snap, np.rint(s), i)
    f = np.where(snap, 0.0, f)
    return i.astype(np.int64) % K, f


def _fiber(t, zr, zi, loop_mode, c0r, c0i, rad, ltab, post_mode, ptab):
    wr, wi = zr, zi
    if loop_mode == 1:
        cr = c0r + rad * np.cos(TWO_PI * t)
        ci = c0i + rad * np.sin(TWO_PI * t)
        wr = zr * zr - zi * zi + cr
        wi = 2.0 * zr * zi + ci
    elif loop_mode == 2:
        i, f = _locate(t, ltab.shape[0])
        j = (i + 1) % ltab.shape[0]
        cr = ltab[i, 0] * (1.0 - f) + ltab[j, 0] * f
        ci = ltab[i, 1] * (1.0 - f) + ltab[j, 1] * f
        wr = zr * zr - zi * zi + cr
        wi = 2.0 * zr * zi + ci
    if post_mode == 0:
        return wr, wi
    K = ptab.shape[0]
    i, f = _locate(t, K)
    j = (i + 1) % K
    lo, hi = ptab[i], ptab[j]
    if post_mode == 1:
        c = lo[:, :4] * (1.0 - f)[:, None] + hi[:, :4] * f[:, None]
        ar, ai, br, bi = c.T
        return ar * wr - ai * wi + br, ar * wi + ai * wr + bi
    g = np.where((lo * hi).sum(axis=1) < 0, -1.0, 1.0)
    c = lo * (1.0 - f)[:, None] + (g * f)[:, None] * hi
    ar, ai, br, bi, er, ei, dr, di = c.T
    nr = ar * wr - ai * wi + br
    ni = ar * wi + ai * wr + bi
    qr = er * wr - ei * wi + dr
    qi = er * wi + ei * wr + di
    den = qr * qr + qi * qi
    with np.errstate(divide="ignore", invalid="ignore"):
        outr = np.where(den == 0.0, np.inf, (nr * qr + ni * qi) / den)
        outi = np.where(den == 0.0, 0.0, (ni * qr - nr * qi) / den)
    return outr, outi


def _fiber_distance(t, zr, zi, curve, n):
    p, M = curve.shape[0], curve.shape[1]
    best = np.full(t.shape, np.inf)
    for c in range(p):
        for i in range(n):
            k, f = _locate((t + i) / n, M)
            j = (k + 1) % M
            gr = curve[c, k, 0] * (1.0 - f) + curve[c, j, 0] * f
            gi = curve[c, k, 1] * (1.0 - f) + curve[c, j, 1] * f
            dx = zr - gr
            dy = zi - gi
            best = np.minimum(best, dx * dx + dy * dy)
    return np.sqrt(best)


def run_orbits(theta, zr0, zi0, alpha, loop_mode, c0r, c0i, rad, ltab, post_mode, ptab,
               max_iter, escape_radius, curve, n, thresh, stop_on_failure):
    P = theta.shape[0]
    status = np.zeros(P, dtype=np.int8)
    steps = np.full(P, max_iter, dtype=np.int32)
    idx = np.arange(P)
    t = _wrap(np.asarray(theta, dtype=float))
    zr = np.array(zr0, dtype=float)
    zi = np.array(zi0, dtype=float)
    th = np.asarray(thresh, dtype=float)
    use_curve = curve.shape[0] > 0
    R2 = escape_radius * escape_radius
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(max_iter + 1):
            if idx.size == 0:
                break
            if use_curve:
                hit = _fiber_distance(t, zr, zi, curve, n) < th
                status[idx[hit]] = 2
                steps[idx[hit]] = k
            else:
                hit = np.zeros(idx.size, dtype=bool)
            esc = ~hit & (~(np.isfinite(zr) & np.isfinite(zi)) | (zr * zr + zi * zi > R2))
            if esc.any():
                status[idx[esc]] = 1
                steps[idx[esc]] = k
                if stop_on_failure:
                    # unresolved points stay at status 0, as in the compiled loop
                    break
            keep = ~(hit | esc)
            idx, t, zr, zi, th = idx[keep], t[keep], zr[keep], zi[keep], th[keep]
            if k == max_iter or idx.size == 0:
                break
            zr, zi = _fiber(t, zr, zi, loop_mode, c0r, c0i, rad, ltab, post_mode, ptab)
            t = _wrap(t + alpha)
    return status, steps


def critical_escape(pr, pi_, kind, max_iter, escape_radius):
    ar = np.asarray(pr, dtype=float)
    ai = np.asarray(pi_, dtype=float)
    P = ar.size
    out = np.full(P, -1, dtype=np.int32)
    if kind == 0:
        zr = np.zeros(P)
        zi = np.zeros(P)
        R2 = np.full(P, escape_radius * escape_radius)
    else:
        zr = -0.5 * ar
        zi = -0.5 * ai
        rr = np.maximum(np.sqrt(ar * ar + ai * ai) + 2.0, escape_radius)
        R2 = rr * rr
    idx = np.arange(P)
    for k in range(max_iter + 1):
        esc = zr * zr + zi * zi > R2
        out[idx[esc]] = k
        keep = ~esc
        idx, zr, zi, ar, ai, R2 = idx[keep], zr[keep], zi[keep], ar[keep], ai[keep], R2[keep]
        if k == max_iter or idx.size == 0:
            break
        if kind == 0:
            zr, zi = zr * zr - zi * zi + ar, 2.0 * zr * zi + ai
        else:
            zr, zi = zr * zr - zi * zi + ar * zr - ai * zi, 2.0 * zr * zi + ar * zi + ai * zr
    return out
