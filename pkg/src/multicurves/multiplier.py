"""Multipliers of invariant multi-curves, linearizing scales, tubes and basins."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .core import DEFAULT_ESCAPE_RADIUS, FibredMap, cover_angles, periodic_interp, wrap
from .errors import InconsistentClassificationError, LinearizationError
from .multicurve import MultiCurve

SINGULAR_CUTOFF = 1e-13
INDIFFERENCE_BAND = 1e-6


@dataclass
class MultiplierReport:
    kappa: float
    log_integral: float
    N: int
    singularity_flags: list = field(default_factory=list)
    super_attracting: bool = False
    per_component: list = field(default_factory=list)

    def to_json(self) -> dict:
        d = asdict(self)
        d["log_integral"] = None if not np.isfinite(self.log_integral) else self.log_integral
        return d


def _log_mean_with_zeros(f: np.ndarray):
    """Grid mean of log|f| over the periodic grid, allowing simple zeros at nodes.

    Each isolated zero at node j is removed with the kernel log|2 sin pi(t - t_j)|,
    whose integral over the circle is 0; the remaining integrand is smooth
    with value log(|f'(t_j)| / 2 pi) at the node. Returns (mean, zero indices,
    super_attracting).
    """
    M = f.size
    mod = np.abs(f)
    zeros = np.flatnonzero(mod < SINGULAR_CUTOFF)
    if zeros.size == 0:
        return float(np.mean(np.log(mod))), zeros, False
    if zeros.size == M:
        return -np.inf, zeros, True
    zset = set(int(j) for j in zeros)
    if any(((j + 1) % M) in zset for j in zset):
        # a run of vanishing derivative: not an isolated zero
        return -np.inf, zeros, True
    t = np.arange(M) / M
    h = 1.0 / M
    with np.errstate(divide="ignore"):
        g = np.log(mod)
    for j in zeros:
        d = np.abs(np.sin(np.pi * (t - t[j])))
        d[j] = 1.0
        g = g - np.log(2 * d)
    for j in zeros:
        # fourth-order centered difference
        slope = abs(8 * (f[(j + 1) % M] - f[(j - 1) % M]) - (f[(j + 2) % M] - f[(j - 2) % M])) / (12 * h)
        val = np.log(slope / (2 * np.pi))
        for i in zeros:
            if i != j:
                val -= np.log(2 * abs(np.sin(np.pi * (t[j] - t[i]))))
        g[j] = val
    return float(np.mean(g)), zeros, False


def derivative_along(F: FibredMap, curve: MultiCurve, component: int = 0) -> np.ndarray:
    """d/dz of the lifted fiber map at the grid samples of one component."""
    base = cover_angles(curve.n, curve.M)
    return np.asarray(F.fiber_derivative(base, curve.components[component]), dtype=complex)


def multiplier(F: FibredMap, curve: MultiCurve, tau: int = 0) -> MultiplierReport:
    """exp of the grid mean of log|d_z p(g(theta))| over each unfolding, averaged."""
    logs, flags = [], []
    sup = False
    M = curve.M
    for ci in range(curve.p):
        f = derivative_along(F, curve, ci)
        val, zeros, s = _log_mean_with_zeros(f)
        flags.extend(float(j / M) for j in zeros)
        sup = sup or s
        logs.append(val)
    if sup:
        return MultiplierReport(0.0, -np.inf, M, sorted(flags), True, logs)
    li = float(np.mean(logs))
    return MultiplierReport(float(np.exp(li)), li, M, sorted(flags), False, logs)


def classify(report: MultiplierReport, band: float = INDIFFERENCE_BAND) -> str:
    if report.super_attracting or report.kappa == 0:
        return "super_attracting"
    if report.kappa < 1 - band:
        return "attracting"
    if report.kappa > 1 + band:
        return "repulsor"
    return "indifferent"


# ---------------------------------------------------------- linearization

@dataclass(eq=False)
class LinearizationData:
    N_birkhoff: int
    a: np.ndarray
    c: float
    b: np.ndarray
    a_shift: np.ndarray
    conjugated_modulus: np.ndarray
    kind: str
    m: float
    delta: float
    rotation: float

    def certificate(self) -> bool:
        if self.kind == "attracting":
            return bool(self.conjugated_modulus.max() <= self.c)
        return bool(self.conjugated_modulus.min() >= self.c)

    def to_json(self):
        return {"N_birkhoff": self.N_birkhoff, "c": self.c, "kind": self.kind, "m": self.m,
                "delta": self.delta, "sup_modulus": float(self.conjugated_modulus.max()),
                "inf_modulus": float(self.conjugated_modulus.min()), "certificate": self.certificate()}


def birkhoff_sums(phi: np.ndarray, rotation: float, theta, k: int) -> np.ndarray:
    """S_k(theta) = sum_{i<k} phi(theta + i rotation) with phi linearly interpolated."""
    theta = np.asarray(theta, dtype=float)
    s = np.zeros_like(theta)
    for i in range(k):
        s = s + periodic_interp(phi, theta + i * rotation)
    return s


def birkhoff_linearize(F: FibredMap, curve: MultiCurve, tau: int, delta: Optional[float] = None,
                       cap: int = 1_000_000, component: int = 0) -> LinearizationData:
    """Scale a(theta) with |d_z q| = exp(S_N / N) along the curve after conjugation.

    H(theta, z) = (theta, a(theta) z + b(theta)) with b the curve and
    a = exp((1/N) sum_{k<N} S_k); the conjugated derivative at the curve is
    |p'| a(theta + rot) / a(theta).
    """
    rep = multiplier(F, curve, tau)
    kind = classify(rep)
    if kind not in ("attracting", "repulsor"):
        raise LinearizationError(f"linearization needs an attracting or repulsor curve, got {kind}")
    if rep.singularity_flags:
        raise LinearizationError("derivative vanishes on the curve; log-derivative is not continuous")
    m = rep.log_integral
    if delta is None:
        delta = abs(m) / 2
    if not 0 < delta < abs(m):
        raise LinearizationError(f"margin delta={delta} must lie in (0, |log kappa|)")
    rot = (F.alpha + tau) / curve.n
    g = curve.components[component]
    phi = np.log(np.abs(derivative_along(F, curve, component)))
    M = curve.M
    th = np.arange(M) / M
    bound = m + delta if kind == "attracting" else m - delta
    S = np.zeros(M)
    S_sh = np.zeros(M)
    acc = np.zeros(M)
    acc_sh = np.zeros(M)
    N = 0
    while True:
        acc += S
        acc_sh += S_sh
        S = S + periodic_interp(phi, th + N * rot)
        S_sh = S_sh + periodic_interp(phi, th + (N + 1) * rot)
        N += 1
        avg = S / N
        if kind == "attracting" and avg.max() < bound - 1e-12:
            break
        if kind == "repulsor" and avg.min() > bound + 1e-12:
            break
        if N >= cap:
            raise LinearizationError(f"no Birkhoff length <= {cap} reaches the margin {delta}")
    a = np.exp(acc / N)
    a_sh = np.exp(acc_sh / N)
    modulus = np.exp(phi) * a_sh / a
    return LinearizationData(N, a, float(np.exp(bound)), g.copy(), a_sh, modulus, kind, m, delta, rot)


# ------------------------------------------------------------ tube/basin

@dataclass
class TubeEstimate:
    radius: float
    verified_samples: int
    iterate_budget: int
    levels_tried: int = 0
    stride: int = 1

    def to_json(self):
        return asdict(self)


class AttractionResult:
    """Truthy iff attracted; carries status and the step count."""

    def __init__(self, status: str, steps: int):
        self.status = status
        self.steps = steps

    def __bool__(self):
        return self.status == "attracted"

    def __repr__(self):
        return f"AttractionResult({self.status!r}, steps={self.steps})"


def _probe_points(curve: MultiCurve, r: float, stride: int, directions: int = 8):
    """Grid base angles and fiber points displaced by r in `directions` directions."""
    K = curve.K
    idx = np.arange(0, K, stride)
    phi = idx / K
    fib = curve.fibers()[idx]  # (k, p, n)
    dirs = np.exp(2j * np.pi * np.arange(directions) / directions)
    pts = fib[..., None] + r * dirs
    th = np.broadcast_to(phi[:, None, None, None], pts.shape)
    return th.ravel().copy(), pts.ravel().copy()


def tube_radius(F: FibredMap, curve: MultiCurve, tau: int = 0, budget: int = 2000,
                r0: Optional[float] = None, factor: float = 0.5, levels: int = 20,
                stride: int = 1, escape_radius: float = DEFAULT_ESCAPE_RADIUS) -> TubeEstimate:
    """Largest r on a geometric schedule for which every probe halves its distance."""
    from .kernels import run_orbits

    rep = multiplier(F, curve, tau)
    kind = classify(rep)
    if kind not in ("attracting", "super_attracting"):
        raise InconsistentClassificationError(f"tube probes need an attracting curve, got {kind}")
    if r0 is None:
        sep = curve.min_fiber_separation()
        if not np.isfinite(sep):
            sep = 1.0
        r0 = 0.1 * sep
    r = r0
    for level in range(levels):
        th, z = _probe_points(curve, r, stride)
        status, _ = run_orbits(F, curve, th, z, budget, escape_radius, r / 2, stop_on_failure=True)
        if np.all(status == 2):
            return TubeEstimate(float(r), int(z.size), budget, level + 1, stride)
        r *= factor
    raise InconsistentClassificationError(
        f"no tube radius accepted down to {r / factor:.3g}; probes are not attracted within {budget} steps")


def is_attracted(F: FibredMap, pt, curve: MultiCurve, budget: int = 2000, delta: float = 1e-3,
                 tube: Optional[TubeEstimate] = None,
                 escape_radius: float = DEFAULT_ESCAPE_RADIUS) -> AttractionResult:
    from .kernels import run_orbits

    theta, z = pt
    thr = delta if tube is None else min(delta, tube.radius)
    status, steps = run_orbits(F, curve, np.array([wrap(theta)]), np.array([complex(z)]),
                               budget, escape_radius, thr)
    st = {0: "budget-exhausted", 1: "escaped", 2: "attracted"}[int(status[0])]
    return AttractionResult(st, int(steps[0]))
