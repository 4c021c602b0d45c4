"""Invariant 2-curves of fibred quadratic polynomials.

Static fixed-point loops around c = 1/4, the affine post-composition that
makes them invariant for small rotations, the conjugation to canonical form
z**2 + C0(theta), and the period-2 curve around c = -3/4.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (TWO_PI, AffineFamily, CircleLoop, FibredMap, Parabolic2Loop,
                   SampledLoop, check_conditions_4a, cover_angles, wrap)
from .errors import BranchContinuityError, DegenerateCurveError, GridError, InvarianceError
from .multicurve import (LiftedMap, MultiCurve, detect_jumping_integer, invariance_residual,
                         lagrange_family, lift_map)


def _check_grid(N: int, n: int = 2) -> None:
    if N < 8 or N & (N - 1):
        raise GridError(f"N must be a power of two >= 8, got {N}")
    if N % n:
        raise GridError(f"N={N} not divisible by {n}")


def fixed_points(c):
    """Fixed points 1/2 +- sqrt(1/4 - c) of z**2 + c (principal root first)."""
    r = np.sqrt(0.25 - np.asarray(c, dtype=complex))
    z1, z2 = 0.5 + r, 0.5 - r
    if np.ndim(z1) == 0:
        return complex(z1), complex(z2)
    return z1, z2


def affine_lagrange(src, dst):
    """Affine w -> m w + d with src[i] -> dst[i]; works elementwise on arrays."""
    s1, s2 = (np.asarray(x, dtype=complex) for x in src)
    t1, t2 = (np.asarray(x, dtype=complex) for x in dst)
    ds = s1 - s2
    if np.any(ds == 0):
        raise DegenerateCurveError("affine interpolation needs distinct source points")
    m = (t1 - t2) / ds
    d = t1 - m * s1
    if m.ndim == 0:
        return complex(m), complex(d)
    return m, d


# ----------------------------------------------------------- static curve

def static_unfolding(eps: float, x0: float, theta):
    """1/2 + eps e^{2 pi i theta} sqrt(1 + x0 e^{-4 pi i theta})."""
    theta = np.asarray(theta, dtype=float)
    return 0.5 + eps * np.exp(1j * TWO_PI * theta) * np.sqrt(1 + x0 * np.exp(-2j * TWO_PI * theta))


@dataclass(eq=False)
class StaticTwoCurve:
    eps: float
    x0: float
    N: int
    z1: np.ndarray      # base grid k/(N/2), continued along [0, 1)
    z2: np.ndarray
    unfolding: np.ndarray
    loop: Parabolic2Loop

    @property
    def curve(self) -> MultiCurve:
        return MultiCurve([self.unfolding], 2)

    @property
    def fibred_map(self) -> FibredMap:
        return FibredMap(0.0, self.loop, meta={"construction": "static"})

    def fixed_point_residual(self) -> float:
        th = np.arange(self.z1.size) / self.z1.size
        c = self.loop(th)
        return float(max(np.abs(self.z1**2 + c - self.z1).max(), np.abs(self.z2**2 + c - self.z2).max()))


def build_static_two_curve(eps: float, x0: float, N: int = 4096) -> StaticTwoCurve:
    """The 2-curve of fixed points of z**2 + C(theta) for the loop around 1/4.

    N is the size of the unfolding grid; z1, z2 live on the base grid of N/2
    nodes.
    """
    check_conditions_4a(eps, x0)
    _check_grid(N)
    K = N // 2
    phi = np.arange(K) / K
    root = eps * np.exp(1j * np.pi * phi) * np.sqrt(1 + x0 * np.exp(-1j * TWO_PI * phi))
    g = static_unfolding(eps, x0, np.arange(N) / N)
    return StaticTwoCurve(eps, x0, N, 0.5 + root, 0.5 - root, g, Parabolic2Loop(eps, x0))


# ------------------------------------------------------ tau = 0 composition

def slope_A(x0: float, alpha: float, phi):
    """A(phi) = e^{pi i alpha} sqrt(1 + x0 e^{-2 pi i (phi + alpha)}) / sqrt(1 + x0 e^{-2 pi i phi})."""
    phi = np.asarray(phi, dtype=float)
    return (np.exp(1j * np.pi * alpha) * np.sqrt(1 + x0 * np.exp(-1j * TWO_PI * (phi + alpha)))
            / np.sqrt(1 + x0 * np.exp(-1j * TWO_PI * phi)))


def log_A(x0: float, alpha: float, phi):
    """Continuous logarithm of A (principal logs of right half-plane radicands)."""
    phi = np.asarray(phi, dtype=float)
    return (1j * np.pi * alpha + 0.5 * np.log(1 + x0 * np.exp(-1j * TWO_PI * (phi + alpha)))
            - 0.5 * np.log(1 + x0 * np.exp(-1j * TWO_PI * phi)))


@dataclass(eq=False)
class Tau0Construction:
    base_map: FibredMap
    lifted: LiftedMap
    curve: MultiCurve
    tau: int
    residual: float
    static: StaticTwoCurve


def post_compose_tau0(eps: float, x0: float, alpha: float, N: int = 4096,
                      interpolation: str = "linear") -> Tau0Construction:
    """Compose the static map with the affine family moving both fixed points along the curve."""
    st = build_static_two_curve(eps, x0, N)
    curve = MultiCurve([st.unfolding], 2, interpolation)
    post = lagrange_family(curve, alpha, 0)
    F = FibredMap(alpha, st.loop, post, meta={"construction": "tau0", "eps": eps, "x0": x0})
    res = invariance_residual(F, curve, 0)
    tau = detect_jumping_integer(F, curve)
    return Tau0Construction(F, lift_map(F, 2, 0), curve, tau, res, st)


# ---------------------------------------------------------- normalization

@dataclass(eq=False)
class NormalizationData:
    x0: float
    alpha: float
    N: int
    J: int
    A: np.ndarray
    u: np.ndarray
    residual: float
    extra: dict = field(default_factory=dict)

    def log_u_at(self, theta):
        return _log_u(self.x0, self.alpha, self.J, theta)

    def u_at(self, theta):
        return np.exp(self.log_u_at(theta))

    def A_at(self, theta):
        return slope_A(self.x0, self.alpha, theta)


def _log_u(x0, alpha, J, theta):
    # log of A^{-1} prod_j [A(theta + j alpha)/A(theta + (j+1) alpha)]^{1/2^{j+1}}
    theta = np.asarray(theta, dtype=float)
    la = [log_A(x0, alpha, theta + j * alpha) for j in range(J + 1)]
    out = -la[0]
    for j in range(J):
        out = out + (la[j] - la[j + 1]) * 0.5 ** (j + 1)
    return out


def normalization(x0: float, alpha: float, N: int = 4096, J: int = 60) -> NormalizationData:
    """A and u on the grid k/N, with the residual of u(theta + alpha) = A(theta) u(theta)**2."""
    if J < 1:
        raise ValueError("truncation depth J must be >= 1")
    th = np.arange(N) / N
    la = log_A(x0, alpha, th)
    jumps = np.abs(np.diff(np.concatenate([la.imag, la.imag[:1]])))
    if jumps.max() > np.pi / 2:
        raise BranchContinuityError(f"log A jumps by {jumps.max():.3g} between grid nodes")
    lu = _log_u(x0, alpha, J, th)
    ju = np.abs(np.diff(np.concatenate([lu.imag, lu.imag[:1]])))
    if ju.max() > np.pi / 2:
        raise BranchContinuityError(f"log u jumps by {ju.max():.3g} between grid nodes")
    A = np.exp(la)
    u = np.exp(lu)
    if np.any(u == 0):
        raise BranchContinuityError("u vanishes on the grid")
    lhs = np.exp(_log_u(x0, alpha, J, th + alpha))
    residual = float(np.abs(lhs - A * u * u).max())
    return NormalizationData(x0, alpha, N, J, A, u, residual)


def winding_number(values) -> int:
    """Winding number of a closed sampled loop around 0."""
    v = np.asarray(values, dtype=complex)
    d = np.angle(np.roll(v, -1) / v)
    return int(round(d.sum() / TWO_PI))


@dataclass(frozen=True, eq=False)
class ClosedFormLoop:
    """Loop evaluated by a closed formula; values on a grid are kept for export."""

    func: object
    N: int
    name: str = "closed_form"

    kind = "closed_form"

    def __call__(self, theta):
        return self.func(theta)

    @property
    def values(self):
        return np.asarray(self.func(np.arange(self.N) / self.N), dtype=complex)

    def sampled(self) -> SampledLoop:
        return SampledLoop(self.values)

    def to_json(self):
        return {"kind": "sampled", "N": self.N, "source": self.name}


@dataclass(eq=False)
class CanonicalConstruction:
    base_map: FibredMap
    curve: MultiCurve
    report: object
    residual: float
    convention: str
    residuals: dict
    normalization: NormalizationData
    winding_about_quarter: int
    log_integrals: dict


CONVENTIONS = (
    ("conjugated", "cover"),
    ("conjugated", "theta"),
    ("literal", "cover"),
    ("literal", "theta"),
)


def canonical_two_curve(eps: float, x0: float, alpha: float, N: int = 4096, J: int = 60,
                        tol: float = 1e-6) -> CanonicalConstruction:
    """Conjugate the tau = 0 map by z = u(theta) w to the form w**2 + C0(theta).

    Two readings are tried for the loop: the conjugated constant term
    (A C + (1 - A)/2) / u(theta + alpha) and the bare C / u(theta + alpha);
    and two for the curve: g(theta) / u(<2 theta>) or g(theta) / u(theta).
    The first pair with residual <= tol is kept.
    """
    from .multiplier import multiplier

    check_conditions_4a(eps, x0)
    _check_grid(N)
    nd = normalization(x0, alpha, N // 2, J)
    base_loop = Parabolic2Loop(eps, x0)

    def c_conj(phi):
        A = slope_A(x0, alpha, phi)
        return (A * base_loop(phi) + 0.5 * (1 - A)) / nd.u_at(wrap(np.asarray(phi) + alpha))

    def c_lit(phi):
        return base_loop(phi) / nd.u_at(wrap(np.asarray(phi) + alpha))

    th = np.arange(N) / N
    g = static_unfolding(eps, x0, th)
    curves = {"cover": g / nd.u_at(cover_angles(2, N)), "theta": g / nd.u_at(th)}
    loops = {"conjugated": c_conj, "literal": c_lit}

    residuals = {}
    chosen = None
    for lk, ck in CONVENTIONS:
        loop = ClosedFormLoop(loops[lk], N // 2, f"canonical_{lk}")
        F = FibredMap(alpha, loop, None, meta={"construction": "canonical", "eps": eps, "x0": x0,
                                               "convention": f"{lk}/{ck}"})
        try:
            curve = MultiCurve([curves[ck]], 2)
        except DegenerateCurveError:
            residuals[f"{lk}/{ck}"] = float("inf")
            continue
        r = invariance_residual(F, curve, 0)
        residuals[f"{lk}/{ck}"] = r
        if chosen is None and r <= tol:
            chosen = (F, curve, r, f"{lk}/{ck}")
    if chosen is None:
        raise InvarianceError(f"no argument convention gives an invariant curve: {residuals}")
    F, curve, r, conv = chosen
    rep = multiplier(F, curve, 0)
    phi = np.arange(N // 2) / (N // 2)
    wind = winding_number(F.loop(phi) - 0.25)
    logs = {
        "mean_log_abs_u_over_2": float(np.mean(np.log(np.abs(nd.u / 2)))),
        "mean_log_abs_2A": float(np.mean(np.log(np.abs(2 * nd.A)))),
    }
    return CanonicalConstruction(F, curve, rep, r, conv, residuals, nd, wind, logs)


# ----------------------------------------------------------- tau = 1 curve

@dataclass(eq=False)
class Tau1Construction:
    base_map: FibredMap
    curve: MultiCurve
    tau: int
    residual: float
    static_swap_residual: float


def tau1_period2(eps: float = 0.05, alpha: float = 0.0, N: int = 4096,
                 interpolation: str = "linear") -> Tau1Construction:
    """Period-2 curve of z**2 - 3/4 - eps**2 e^{2 pi i theta}, glued by the monodromy."""
    if eps <= 0 or eps > 0.25:
        raise ValueError("eps must lie in (0, 1/4]")
    _check_grid(N)
    loop = CircleLoop(-0.75 + 0j, -eps**2)
    g = -0.5 + eps * np.exp(1j * TWO_PI * np.arange(N) / N)
    curve = MultiCurve([g], 2, interpolation)
    static = FibredMap(0.0, loop)
    swap = invariance_residual(static, curve, 1)
    post = lagrange_family(curve, alpha, 0)
    F = FibredMap(alpha, loop, post, meta={"construction": "tau1", "eps": eps})
    tau = detect_jumping_integer(F, curve)
    res = invariance_residual(F, curve, 1 if tau is None else tau)
    return Tau1Construction(F, curve, tau, res, swap)
