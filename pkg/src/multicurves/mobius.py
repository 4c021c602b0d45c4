"""Möbius transformations of the Riemann sphere.

Points of the sphere are plain complex numbers; the point at infinity is
``INF = complex("inf")`` (any complex value with an infinite component is
read as infinity).
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCurveError, SingularInputError

INF = complex("inf")


def is_inf(z) -> bool:
    z = complex(z)
    return cmath.isinf(z)


def _sign_normalize(coeffs):
    for w in coeffs:
        if w != 0:
            if w.real < 0 or (w.real == 0 and w.imag < 0):
                return tuple(-x for x in coeffs)
            return tuple(coeffs)
    raise SingularInputError("zero matrix is not a Möbius map")


@dataclass(frozen=True)
class MobiusMap:
    """z -> (a z + b) / (c z + d), stored with ad - bc = 1."""

    a: complex
    b: complex
    c: complex
    d: complex

    @classmethod
    def from_matrix(cls, a, b, c, d) -> "MobiusMap":
        a, b, c, d = (complex(x) for x in (a, b, c, d))
        det = a * d - b * c
        if det == 0:
            raise SingularInputError("Möbius matrix is singular")
        s = cmath.sqrt(det)
        return cls(*_sign_normalize((a / s, b / s, c / s, d / s)))

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1 + 0j, 0j, 0j, 1 + 0j)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def __call__(self, z):
        if is_inf(z):
            return INF if self.c == 0 else self.a / self.c
        z = complex(z)
        den = self.c * z + self.d
        if den == 0:
            return INF
        return (self.a * z + self.b) / den

    def derivative(self, z):
        den = self.c * complex(z) + self.d
        if den == 0:
            raise SingularInputError(f"derivative of Möbius map has a pole at {z}")
        return (self.a * self.d - self.b * self.c) / den**2

    def compose(self, other: "MobiusMap") -> "MobiusMap":
        """self ∘ other."""
        m = self.matrix @ other.matrix
        return MobiusMap.from_matrix(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    def inverse(self) -> "MobiusMap":
        return MobiusMap.from_matrix(self.d, -self.b, -self.c, self.a)

    def to_json(self) -> dict:
        return {k: [getattr(self, k).real, getattr(self, k).imag] for k in "abcd"}


def _to_zero_one_inf(z1, z2, z3):
    """Matrix of the cross-ratio map sending (z1, z2, z3) to (0, 1, inf)."""
    i1, i2, i3 = is_inf(z1), is_inf(z2), is_inf(z3)
    if i1:
        return (0j, z2 - z3, 1 + 0j, -z3)
    if i2:
        return (1 + 0j, -z1, 1 + 0j, -z3)
    if i3:
        return (1 + 0j, -z1, 0j, z2 - z1)
    return (z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1))


def _distinct(pts):
    for i in range(3):
        for j in range(i + 1, 3):
            p, q = pts[i], pts[j]
            if is_inf(p) and is_inf(q):
                return False
            if not is_inf(p) and not is_inf(q) and p == q:
                return False
    return True


def mobius_through(src, dst, check_tol: float = 1e-12) -> MobiusMap:
    """The unique Möbius map with M(src[i]) = dst[i] for i = 0, 1, 2."""
    src = tuple(complex(z) for z in src)
    dst = tuple(complex(w) for w in dst)
    if not (_distinct(src) and _distinct(dst)):
        raise DegenerateCurveError("Möbius interpolation needs three distinct points on each side")
    s = MobiusMap.from_matrix(*_to_zero_one_inf(*src))
    t = MobiusMap.from_matrix(*_to_zero_one_inf(*dst))
    m = t.inverse().compose(s)
    if check_tol is not None:
        for z, w in zip(src, dst):
            mz = m(z)
            if is_inf(w):
                ok = is_inf(mz) or abs(mz) > 1.0 / check_tol
            else:
                ok = not is_inf(mz) and abs(mz - w) <= check_tol * max(1.0, abs(w))
            if not ok:
                raise DegenerateCurveError(f"Möbius interpolation residual too large at {z}")
    return m


def mobius_through_arrays(z1, z2, z3, w1, w2, w3):
    """Vectorized three-point interpolation for finite points.

    Returns arrays (a, b, c, d) normalized to ad - bc = 1. Signs are chosen
    per element by the same rule as :class:`MobiusMap`; use
    :func:`align_signs` before interpolating between elements.
    """
    z1, z2, z3, w1, w2, w3 = (np.asarray(x, dtype=complex) for x in (z1, z2, z3, w1, w2, w3))
    # S maps (z1, z2, z3) -> (0, 1, inf); T likewise for w; M = T^{-1} S.
    sa, sb, sc, sd = z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1)
    ta, tb, tc, td = w2 - w3, -w1 * (w2 - w3), w2 - w1, -w3 * (w2 - w1)
    ia, ib, ic, id_ = td, -tb, -tc, ta
    a = ia * sa + ib * sc
    b = ia * sb + ib * sd
    c = ic * sa + id_ * sc
    d = ic * sb + id_ * sd
    det = a * d - b * c
    if np.any(det == 0):
        raise DegenerateCurveError("coincident interpolation nodes")
    s = np.sqrt(det)
    a, b, c, d = a / s, b / s, c / s, d / s
    lead = np.where(a != 0, a, np.where(b != 0, b, np.where(c != 0, c, d)))
    flip = (lead.real < 0) | ((lead.real == 0) & (lead.imag < 0))
    sgn = np.where(flip, -1.0, 1.0)
    return a * sgn, b * sgn, c * sgn, d * sgn


def align_signs(a, b, c, d):
    """Flip signs along a periodic grid so that neighbouring matrices agree.

    Normalized SL(2) matrices are defined up to a global sign; linear
    interpolation between M and -M would pass through zero.
    """
    a, b, c, d = (np.array(x, dtype=complex) for x in (a, b, c, d))
    for k in range(1, a.size):
        dot = (np.conj(a[k - 1]) * a[k] + np.conj(b[k - 1]) * b[k]
               + np.conj(c[k - 1]) * c[k] + np.conj(d[k - 1]) * d[k]).real
        if dot < 0:
            a[k], b[k], c[k], d[k] = -a[k], -b[k], -c[k], -d[k]
    return a, b, c, d
