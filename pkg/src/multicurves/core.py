"""Fibred maps (theta, z) -> (theta + alpha, p_theta(z)) over a circle rotation.

Angles are floats in [0, 1) measured in full turns. A fiber map is built
from an optional quadratic core ``z**2 + C(theta)`` followed by an optional
post-composition (affine or Möbius family). The canonical quadratic family
is the core alone.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import ConditionError, DomainError, GridError, SingularInputError
from .mobius import INF

TWO_PI = 2.0 * np.pi
DEFAULT_ALPHA = (5 ** 0.5 - 1) / 200
DEFAULT_ESCAPE_RADIUS = 4.0


def wrap(theta):
    """Reduce angles mod 1 into [0, 1); safe against -0.0 and round-up to 1."""
    t = np.mod(theta, 1.0)
    t = np.where(t >= 1.0, 0.0, t) + 0.0
    if np.ndim(t) == 0:
        return float(t)
    return t


def cover_angles(n: int, M: int) -> np.ndarray:
    """Base angles <n theta_k> of the grid theta_k = k/M, computed exactly."""
    k = np.arange(M, dtype=np.int64)
    return ((n * k) % M) / M


def periodic_interp(samples: np.ndarray, theta):
    """Linear interpolation of a 1-periodic function given on the grid k/K."""
    samples = np.asarray(samples)
    K = samples.shape[-1]
    if K == 1:
        return np.broadcast_to(samples[..., 0], np.shape(theta)).copy() if np.ndim(theta) else samples[..., 0]
    t = wrap(theta) * K
    i = np.floor(t)
    f = t - i
    # nodes hit up to rounding are snapped so grid lookups are exact
    snap = np.abs(f - np.rint(f)) < 1e-9
    i = np.where(snap, np.rint(t), i)
    f = np.where(snap, 0.0, f)
    i = i.astype(np.int64) % K
    return samples[..., i] * (1.0 - f) + samples[..., (i + 1) % K] * f


def fourier_shift(samples: np.ndarray, shift: float) -> np.ndarray:
    """Trigonometric interpolation of samples at theta_k + shift."""
    samples = np.asarray(samples, dtype=complex)
    M = samples.size
    freqs = np.fft.fftfreq(M, d=1.0 / M)
    if M % 2 == 0:
        # Nyquist mode split evenly between +-M/2 keeps real data real
        coef = np.fft.fft(samples)
        nyq = M // 2
        phase = np.exp(2j * np.pi * freqs * shift)
        out = coef * phase
        out[nyq] = coef[nyq] * np.cos(np.pi * M * shift)
        return np.fft.ifft(out)
    return np.fft.ifft(np.fft.fft(samples) * np.exp(2j * np.pi * freqs * shift))


# ---------------------------------------------------------------- loops

@dataclass(frozen=True)
class CircleLoop:
    """C(theta) = center + radius * exp(2 pi i theta)."""

    center: complex
    radius: float

    kind = "circle"

    def __call__(self, theta):
        return self.center + self.radius * np.exp(1j * TWO_PI * np.asarray(theta, dtype=float))

    def derivative(self, theta):
        return 1j * TWO_PI * self.radius * np.exp(1j * TWO_PI * np.asarray(theta, dtype=float))

    def as_circle(self):
        return complex(self.center), float(self.radius)

    def to_json(self):
        return {"kind": "circle", "center": [self.center.real, self.center.imag], "radius": self.radius}


def check_conditions_4a(eps: float, x0: float) -> None:
    if not (0.0 <= x0 < 0.25):
        raise ConditionError(f"x0 must satisfy 0 <= x0 < 1/4, got {x0}")
    if eps <= 0:
        raise ConditionError(f"eps must be positive, got {eps}")
    if not eps**2 / (0.25 - eps**2 * x0) < 1.0:
        raise ConditionError(f"eps^2 / (1/4 - eps^2 x0) must be < 1 (eps={eps}, x0={x0})")


@dataclass(frozen=True)
class Parabolic2Loop:
    """C(theta) = 1/4 - eps^2 x0 - eps^2 exp(2 pi i theta), a loop around c = 1/4."""

    eps: float
    x0: float

    kind = "parabolic2"

    def __post_init__(self):
        check_conditions_4a(self.eps, self.x0)

    def __call__(self, theta):
        e2 = self.eps**2
        return 0.25 - e2 * self.x0 - e2 * np.exp(1j * TWO_PI * np.asarray(theta, dtype=float))

    def as_circle(self):
        e2 = self.eps**2
        return complex(0.25 - e2 * self.x0), -e2

    def to_json(self):
        return {"kind": "parabolic2", "eps": self.eps, "x0": self.x0}


@dataclass(frozen=True, eq=False)
class SampledLoop:
    """Periodic loop given on the uniform grid k/N, linearly interpolated."""

    values: np.ndarray

    kind = "sampled"

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=complex)
        N = v.size
        if N < 8 or N & (N - 1):
            raise GridError(f"sampled loops need a power-of-two grid with N >= 8, got {N}")
        object.__setattr__(self, "values", v)

    @property
    def N(self) -> int:
        return self.values.size

    def __call__(self, theta):
        return periodic_interp(self.values, theta)

    def to_json(self):
        return {"kind": "sampled", "N": self.N}


CoefficientLoop = Union[CircleLoop, Parabolic2Loop, SampledLoop]


def loop_value(loop: CoefficientLoop, theta):
    return loop(theta)


# ---------------------------------------------------- post-compositions

@dataclass(frozen=True, eq=False)
class AffineFamily:
    """theta -> (w -> m(theta) w + d(theta)) on a uniform grid (size 1 = constant)."""

    m: np.ndarray
    d: np.ndarray

    kind = "affine"

    def __post_init__(self):
        m = np.atleast_1d(np.asarray(self.m, dtype=complex))
        d = np.atleast_1d(np.asarray(self.d, dtype=complex))
        if m.shape != d.shape or m.ndim != 1:
            raise GridError("affine family coefficient grids must match")
        object.__setattr__(self, "m", np.ascontiguousarray(m))
        object.__setattr__(self, "d", np.ascontiguousarray(d))

    @classmethod
    def constant(cls, m=1.0, d=0.0) -> "AffineFamily":
        return cls(np.array([m]), np.array([d]))

    @property
    def K(self) -> int:
        return self.m.size

    def coefficients(self, theta):
        return periodic_interp(self.m, theta), periodic_interp(self.d, theta)

    def apply(self, theta, w):
        m, d = self.coefficients(theta)
        return m * w + d

    def derivative(self, theta, w):
        m, _ = self.coefficients(theta)
        return m * np.ones_like(np.asarray(w, dtype=complex))

    def table(self) -> np.ndarray:
        t = np.zeros((self.K, 4), dtype=complex)
        t[:, 0], t[:, 1] = self.m, self.d
        return t


@dataclass(frozen=True, eq=False)
class MobiusFamily:
    """theta -> M_theta with coefficient grids a, b, c, d (ad - bc = 1)."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    kind = "mobius"

    def __post_init__(self):
        arrs = [np.ascontiguousarray(np.atleast_1d(np.asarray(x, dtype=complex))) for x in (self.a, self.b, self.c, self.d)]
        if len({x.shape for x in arrs}) != 1 or arrs[0].ndim != 1:
            raise GridError("Möbius family coefficient grids must match")
        for name, x in zip("abcd", arrs):
            object.__setattr__(self, name, x)

    @classmethod
    def constant(cls, a=1.0, b=0.0, c=0.0, d=1.0) -> "MobiusFamily":
        return cls(np.array([a]), np.array([b]), np.array([c]), np.array([d]))

    @property
    def K(self) -> int:
        return self.a.size

    def coefficients(self, theta):
        K = self.K
        if K == 1:
            return tuple(np.broadcast_to(x[0], np.shape(theta)) for x in (self.a, self.b, self.c, self.d))
        t = wrap(theta) * K
        i = np.floor(t)
        f = t - i
        snap = np.abs(f - np.rint(f)) < 1e-9
        i = np.where(snap, np.rint(t), i)
        f = np.where(snap, 0.0, f)
        i = i.astype(np.int64) % K
        j = (i + 1) % K
        lo = [x[i] for x in (self.a, self.b, self.c, self.d)]
        hi = [x[j] for x in (self.a, self.b, self.c, self.d)]
        dot = sum((np.conj(p) * q).real for p, q in zip(lo, hi))
        s = np.where(dot < 0, -1.0, 1.0)
        return tuple(p * (1.0 - f) + s * q * f for p, q in zip(lo, hi))

    def apply(self, theta, w):
        a, b, c, d = self.coefficients(theta)
        w = np.asarray(w, dtype=complex)
        winf = np.isinf(w)
        wf = np.where(winf, 0.0, w)
        num = a * wf + b
        den = c * wf + d
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(den == 0, INF, num / np.where(den == 0, 1.0, den))
            at_inf = np.where(c == 0, INF, a / np.where(c == 0, 1.0, c))
        out = np.where(winf, at_inf, out)
        return out[()] if out.ndim == 0 else out

    def derivative(self, theta, w):
        a, b, c, d = self.coefficients(theta)
        den = c * np.asarray(w, dtype=complex) + d
        if np.any(den == 0):
            raise SingularInputError("Möbius post-composition evaluated at its pole")
        return (a * d - b * c) / den**2

    def table(self) -> np.ndarray:
        return np.stack([self.a, self.b, self.c, self.d], axis=1)


PostFamily = Union[AffineFamily, MobiusFamily]


# ----------------------------------------------------------- fibred map

@dataclass(frozen=True, eq=False)
class FibredMap:
    """F(theta, z) = (theta + alpha, post_theta(z**2 + loop(theta))).

    ``loop=None`` drops the quadratic core and ``post=None`` drops the
    post-composition; alpha = 0 is the static case.
    """

    alpha: float
    loop: Optional[CoefficientLoop] = None
    post: Optional[PostFamily] = None
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def kind(self) -> str:
        if self.loop is not None:
            if self.post is None:
                return "canonical_quadratic"
            return "affine_composed" if self.post.kind == "affine" else "mobius_composed"
        if self.post is None:
            return "identity"
        return self.post.kind

    @property
    def is_rational(self) -> bool:
        return self.post is not None and self.post.kind == "mobius"

    def eval_fiber(self, theta, z):
        z = np.asarray(z, dtype=complex)
        if np.any(np.isinf(z)) and not self.is_rational:
            raise DomainError("infinity is only a legal fiber value for Möbius fibers")
        w = z
        if self.loop is not None:
            with np.errstate(invalid="ignore", over="ignore"):
                w = np.where(np.isinf(z), INF, z * z + self.loop(theta))
        if self.post is not None:
            w = self.post.apply(theta, w)
        w = np.asarray(w, dtype=complex)
        return w[()] if w.ndim == 0 else w

    def fiber_derivative(self, theta, z):
        z = np.asarray(z, dtype=complex)
        if np.any(~np.isfinite(z)):
            raise SingularInputError("fiber derivative needs a finite point")
        if self.loop is not None:
            w = z * z + self.loop(theta)
            dcore = 2.0 * z
        else:
            w = z
            dcore = np.ones_like(z)
        dpost = 1.0 if self.post is None else self.post.derivative(theta, w)
        out = np.asarray(dpost * dcore, dtype=complex)
        return out[()] if out.ndim == 0 else out

    def eval(self, theta, z):
        return wrap(np.asarray(theta, dtype=float) + self.alpha), self.eval_fiber(theta, z)

    def __call__(self, theta, z):
        return self.eval(theta, z)

    def with_alpha(self, alpha: float) -> "FibredMap":
        return FibredMap(alpha, self.loop, self.post, dict(self.meta))


@dataclass
class Orbit:
    thetas: np.ndarray
    points: np.ndarray
    escaped: bool
    escape_index: Optional[int] = None

    def __len__(self):
        return self.points.size


def iterate(F: FibredMap, theta: float, z: complex, n_steps: int,
            escape_radius: float = DEFAULT_ESCAPE_RADIUS) -> Orbit:
    """Forward orbit of (theta, z); index 0 is the starting point."""
    if n_steps < 0 or escape_radius <= 0:
        raise ValueError("n_steps must be >= 0 and escape_radius > 0")
    thetas = [wrap(theta)]
    pts = [complex(z)]
    for k in range(n_steps + 1):
        if not np.isfinite(pts[-1]) or abs(pts[-1]) > escape_radius:
            return Orbit(np.array(thetas), np.array(pts), True, k)
        if k == n_steps:
            break
        t, w = F.eval(thetas[-1], pts[-1])
        thetas.append(float(t))
        pts.append(complex(w))
    return Orbit(np.array(thetas), np.array(pts), False, None)
