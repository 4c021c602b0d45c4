"""Multi-curves in T^1 x C stored through their unfoldings.

A component of a (p, n)-curve is an unfolding: M samples of a closed curve
g on the grid k/M. It projects to the base through theta -> <n theta>, so
the fiber over the base node j/(M/n) consists of the samples j + i M/n,
i = 0..n-1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .core import AffineFamily, FibredMap, MobiusFamily, cover_angles, fourier_shift, periodic_interp, wrap
from .errors import DegenerateCurveError, GridError
from .mobius import align_signs, mobius_through_arrays

SEPARATION_TOL = 1e-10
DETECTION_TOL = 1e-6


def _continuity_ok(s: np.ndarray) -> bool:
    jumps = np.abs(np.diff(np.concatenate([s, s[:1]])))
    return jumps.max() <= max(10.0 * np.median(jumps), 1e-12)


def _self_intersects(s: np.ndarray, tol: float) -> bool:
    if np.ptp(s.real) == 0 and np.ptp(s.imag) == 0:
        return False
    pts = np.column_stack([s.real, s.imag])
    pairs = cKDTree(pts).query_pairs(tol, output_type="ndarray")
    return len(pairs) > 0


@dataclass(frozen=True, eq=False)
class UnfoldingCurve:
    """Unfolding samples g(k/M) of an n-curve."""

    samples: np.ndarray
    winding: int = 1

    def __post_init__(self):
        object.__setattr__(self, "samples", np.ascontiguousarray(self.samples, dtype=complex))

    @property
    def M(self) -> int:
        return self.samples.size

    @property
    def base_point(self) -> complex:
        return complex(self.samples[0])

    def __call__(self, theta):
        return periodic_interp(self.samples, theta)


class MultiCurve:
    """A (p, n)-curve: p unfoldings of equal grid size M, each winding n times.

    Parameters
    ----------
    components : sequence of arrays
        Unfolding samples, one array of length M per component.
    winding : int
        n, the number of turns each component makes over the base.
    interpolation : {"linear", "fourier"}
        Rule for evaluating unfoldings at uniformly shifted grids
        (residual targets and Lagrange targets).
    """

    def __init__(self, components: Sequence[np.ndarray], winding: int = 1,
                 interpolation: str = "linear", validate: bool = True,
                 separation_tol: float = SEPARATION_TOL):
        comps = tuple(np.ascontiguousarray(c, dtype=complex) for c in components)
        if not comps:
            raise ValueError("a multi-curve needs at least one component")
        M = comps[0].size
        if any(c.size != M for c in comps):
            raise GridError("all components must share the same grid")
        if winding < 1 or M % winding:
            raise GridError(f"grid size {M} is not divisible by winding {winding}")
        if interpolation not in ("linear", "fourier"):
            raise ValueError(f"unknown interpolation {interpolation!r}")
        self.components = comps
        self.winding = int(winding)
        self.interpolation = interpolation
        self.separation_tol = separation_tol
        if validate:
            self.check()

    # -- shape
    @property
    def n(self) -> int:
        return self.winding

    @property
    def p(self) -> int:
        return len(self.components)

    @property
    def M(self) -> int:
        return self.components[0].size

    @property
    def K(self) -> int:
        """Number of base grid nodes."""
        return self.M // self.winding

    @property
    def base_points(self):
        return [complex(c[0]) for c in self.components]

    def check(self) -> None:
        """Raise DegenerateCurveError if closure, injectivity or disjointness fails."""
        for i, c in enumerate(self.components):
            if not np.all(np.isfinite(c)):
                raise DegenerateCurveError(f"component {i} has non-finite samples")
            if not _continuity_ok(c):
                raise DegenerateCurveError(f"component {i} is not closed/continuous at grid scale")
            if self.winding > 1 and np.ptp(c.real) == 0 and np.ptp(c.imag) == 0:
                raise DegenerateCurveError(f"component {i} is a point but winds {self.winding} times")
            if _self_intersects(c, self.separation_tol):
                raise DegenerateCurveError(f"component {i} self-intersects at grid scale")
        if self.p > 1:
            fib = self.fibers()
            flat = fib.reshape(self.K, -1)
            for a in range(self.p):
                for b in range(a + 1, self.p):
                    d = np.abs(fib[:, a, :, None] - fib[:, b, None, :]).min()
                    if d <= self.separation_tol:
                        raise DegenerateCurveError(f"components {a} and {b} intersect")
            del flat

    # -- fibers
    def fibers(self) -> np.ndarray:
        """Array (K, p, n): fiber points over every base node."""
        arr = np.stack(self.components)  # (p, M)
        return arr.reshape(self.p, self.n, self.K).transpose(2, 0, 1)

    def fiber(self, theta) -> np.ndarray:
        """All p*n fiber points over an arbitrary base angle, shape (p, n)."""
        t = (wrap(theta) + np.arange(self.n)) / self.n
        return np.stack([periodic_interp(c, t) for c in self.components])

    def min_fiber_separation(self) -> float:
        fib = self.fibers().reshape(self.K, -1)
        m = fib.shape[1]
        if m < 2:
            return np.inf
        best = np.inf
        for i in range(m):
            for j in range(i + 1, m):
                best = min(best, float(np.abs(fib[:, i] - fib[:, j]).min()))
        return best

    def shifted(self, component: int, shift: float) -> np.ndarray:
        """Unfolding of a component evaluated at theta_k + shift."""
        c = self.components[component]
        s = float(shift) % 1.0
        if self.interpolation == "fourier":
            return fourier_shift(c, s)
        k = s * self.M
        if abs(k - round(k)) < 1e-9:
            return np.roll(c, -int(round(k)) % self.M)
        return periodic_interp(c, np.arange(self.M) / self.M + s)

    def fiber_distance(self, theta, z) -> np.ndarray:
        """min over fiber points over theta of |z - point| (vectorized)."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        best = np.full(np.broadcast(theta, z).shape, np.inf)
        for c in self.components:
            for i in range(self.n):
                g = periodic_interp(c, (wrap(theta) + i) / self.n)
                best = np.minimum(best, np.abs(z - g))
        return best

    def with_components(self, components, validate=True) -> "MultiCurve":
        return MultiCurve(components, self.winding, self.interpolation, validate, self.separation_tol)

    def __repr__(self):
        return f"MultiCurve(p={self.p}, n={self.n}, M={self.M}, interp={self.interpolation!r})"


# ------------------------------------------------------------- operations

def segment(curve: MultiCurve, i: int, theta, component: int = 0):
    """gamma_i(theta) = g((i - 1 + theta) / n) for i = 1..n."""
    if not 1 <= i <= curve.n:
        raise IndexError(f"segment index {i} outside 1..{curve.n}")
    if not 0 <= component < curve.p:
        raise IndexError(f"component {component} outside 0..{curve.p - 1}")
    t = (i - 1 + np.asarray(theta, dtype=float)) / curve.n
    return periodic_interp(curve.components[component], t)


def project(unfolding, n: int, interpolation: str = "linear", validate: bool = True) -> MultiCurve:
    samples = unfolding.samples if isinstance(unfolding, UnfoldingCurve) else np.asarray(unfolding)
    if samples.size % n:
        raise GridError(f"grid size {samples.size} is not divisible by n={n}")
    return MultiCurve([samples], n, interpolation, validate)


def unfold(curve: MultiCurve, component: int = 0, base_choice: int = 0) -> UnfoldingCurve:
    """The unfolding whose base point is fiber point ``base_choice`` over theta = 0."""
    if not 0 <= base_choice < curve.n:
        raise IndexError(f"base_choice must lie in 0..{curve.n - 1}")
    c = curve.components[component]
    return UnfoldingCurve(np.roll(c, -base_choice * curve.K), curve.n)


@dataclass(frozen=True)
class Covering:
    """Pi_n(theta, z) = (<n theta>, z) with deck shift tau / n."""

    n: int
    tau: int = 0

    def project(self, theta):
        return wrap(self.n * np.asarray(theta, dtype=float))

    def deck(self, theta):
        return wrap(np.asarray(theta, dtype=float) + self.tau / self.n)


@dataclass(frozen=True)
class LiftedMap:
    """F_tau(theta, z) = (theta + (alpha + tau)/n, f_<n theta>(z))."""

    base_map: FibredMap
    covering: Covering

    @property
    def n(self) -> int:
        return self.covering.n

    @property
    def tau(self) -> int:
        return self.covering.tau

    @property
    def rotation(self) -> float:
        return (self.base_map.alpha + self.tau) / self.n

    def eval_fiber(self, theta, z):
        return self.base_map.eval_fiber(self.covering.project(theta), z)

    def fiber_derivative(self, theta, z):
        return self.base_map.fiber_derivative(self.covering.project(theta), z)

    def eval(self, theta, z):
        return wrap(np.asarray(theta, dtype=float) + self.rotation), self.eval_fiber(theta, z)

    def commutation_defect(self, M: int = 256, z=None) -> float:
        """max |Pi_n F_tau - F Pi_n| over the grid k/M (angles compared mod 1)."""
        theta = np.arange(M) / M
        if z is None:
            z = 0.3 + 0.2j + 0.1 * np.exp(2j * np.pi * theta)
        t1, z1 = self.eval(theta, z)
        t1 = self.covering.project(t1)
        t2, z2 = self.base_map.eval(self.covering.project(theta), z)
        dt = np.abs((t1 - t2 + 0.5) % 1.0 - 0.5)
        return float(max(dt.max(), np.abs(z1 - z2).max()))


def lift_map(F: FibredMap, n: int, tau: int = 0) -> LiftedMap:
    if not 0 <= tau < n:
        raise ValueError(f"tau must lie in 0..{n - 1}")
    return LiftedMap(F, Covering(n, tau))


def invariance_residual(F: FibredMap, curve: MultiCurve, tau: int) -> float:
    """sup_k |f_<n theta_k>(g(theta_k)) - g(theta_k + (alpha + tau)/n)| over components."""
    n, M = curve.n, curve.M
    base = cover_angles(n, M)
    shift = (F.alpha + tau) / n
    worst = 0.0
    for ci, g in enumerate(curve.components):
        with np.errstate(all="ignore"):
            img = F.eval_fiber(base, g)
        target = curve.shifted(ci, shift)
        err = np.abs(img - target)
        if not np.all(np.isfinite(err)):
            return np.inf
        worst = max(worst, float(err.max()))
    return worst


def jumping_residuals(F: FibredMap, curve: MultiCurve) -> list:
    return [invariance_residual(F, curve, tau) for tau in range(curve.n)]


def detect_jumping_integer(F: FibredMap, curve: MultiCurve, tol: float = DETECTION_TOL) -> Optional[int]:
    """The unique tau whose lifted map leaves the unfoldings invariant, else None."""
    sep = curve.min_fiber_separation()
    if sep < 10 * tol:
        raise DegenerateCurveError(f"fiber separation {sep:.3g} too small for detection tolerance {tol}")
    res = jumping_residuals(F, curve)
    good = [t for t, r in enumerate(res) if r <= tol]
    if len(good) > 1:
        raise DegenerateCurveError(f"ambiguous jumping integer: residuals {res}")
    return good[0] if good else None


def _node_targets(curve: MultiCurve, alpha: float, tau: int):
    """Sources and targets over every base node: arrays (K, p*n)."""
    n, K = curve.n, curve.K
    src, dst = [], []
    for ci, g in enumerate(curve.components):
        shifted = curve.shifted(ci, alpha / n)
        for i in range(n):
            src.append(g[i * K:(i + 1) * K])
            j = (i + tau) % n
            dst.append(shifted[j * K:(j + 1) * K])
    return np.stack(src, axis=1), np.stack(dst, axis=1)


def lagrange_family(curve: MultiCurve, alpha: float, tau: int = 0):
    """Affine (2 nodes) or Möbius (3 nodes) family through the fiber nodes.

    Over each base node the family sends gamma_i(theta) to
    gamma_{i+tau}(theta + alpha), indices mod n within a component. With
    tau = 0 it is the post-composition that moves every fiber point along
    its own branch.
    """
    nodes = curve.n * curve.p
    if nodes > 3:
        raise NotImplementedError("Lagrange families are implemented for at most 3 fiber points")
    src, dst = _node_targets(curve, alpha, tau)
    if nodes == 1:
        return AffineFamily(np.ones(curve.K, dtype=complex), dst[:, 0] - src[:, 0])
    if nodes == 2:
        from .quadratic import affine_lagrange
        m, d = affine_lagrange((src[:, 0], src[:, 1]), (dst[:, 0], dst[:, 1]))
        return AffineFamily(m, d)
    a, b, c, d = mobius_through_arrays(src[:, 0], src[:, 1], src[:, 2], dst[:, 0], dst[:, 1], dst[:, 2])
    return MobiusFamily(*align_signs(a, b, c, d))


def lagrange_invariant_map(curve: MultiCurve, alpha: float, tau: int = 0) -> FibredMap:
    """Fibred map whose fibers interpolate the curve's dynamics with jump tau."""
    return FibredMap(alpha, None, lagrange_family(curve, alpha, tau))
