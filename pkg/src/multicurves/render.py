"""Escape-time renders of fiber slices and parameter planes.

Images are H x W x 3 uint8 arrays, row-major, top row at the largest
imaginary part.
"""
from __future__ import annotations

import numpy as np

from .core import DEFAULT_ESCAPE_RADIUS, FibredMap, wrap
from .kernels import critical_escape, run_orbits
from .multiplier import classify, multiplier

BOUNDED = np.array([0, 0, 0], dtype=np.uint8)
MODES = ("julia", "basin", "tube")


def pixel_grid(center: complex, width: float, W: int, H: int) -> np.ndarray:
    """Complex pixel centers; symmetric about `center` so z -> -z maps pixels to pixels."""
    if W < 16 or H < 16:
        raise ValueError("resolution must be at least 16 x 16")
    if width <= 0:
        raise ValueError("window width must be positive")
    s = width / W
    x = (np.arange(W) + 0.5 - W / 2) * s
    y = (H / 2 - np.arange(H) - 0.5) * s
    return complex(center) + x[None, :] + 1j * y[:, None]


def escape_colors(status: np.ndarray, steps: np.ndarray, max_iter: int) -> np.ndarray:
    """Escaped points shaded by log escape time; everything else black."""
    out = np.zeros(status.shape + (3,), dtype=np.uint8)
    esc = status == 1
    t = np.log1p(steps[esc].astype(float)) / np.log1p(max(max_iter, 1))
    out[esc, 0] = (40 + 200 * t).astype(np.uint8)
    out[esc, 1] = (60 + 160 * t ** 0.7).astype(np.uint8)
    out[esc, 2] = (120 + 135 * np.sqrt(t)).astype(np.uint8)
    return out


def render_fiber_slice(F: FibredMap, theta: float, mode: str = "julia", center: complex = 0j,
                       width: float = 4.0, W: int = 256, H: int = 256, max_iter: int = 200,
                       escape_radius: float = DEFAULT_ESCAPE_RADIUS, curve=None, tau: int = 0,
                       static: bool = False, tube_radius: float | None = None, delta: float = 1e-3):
    """Render the fiber over theta; the base angle advances each step unless static."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    G = F.with_alpha(0.0) if static else F
    z = pixel_grid(center, width, W, H)
    th = np.full(z.size, wrap(theta))
    if mode == "julia":
        status, steps = run_orbits(G, None, th, z.ravel(), max_iter, escape_radius)
        return escape_colors(status.reshape(z.shape), steps.reshape(z.shape), max_iter)
    if curve is None:
        raise ValueError(f"{mode} mode needs a curve")
    kind = classify(multiplier(F, curve, tau))
    if kind not in ("attracting", "super_attracting"):
        raise ValueError(f"{mode} mode needs an attracting curve, got {kind}")
    r = tube_radius if tube_radius is not None else delta
    thr = min(delta, r)
    status, steps = run_orbits(G, curve, th, z.ravel(), max_iter, escape_radius, thr)
    mask = (status == 2).reshape(z.shape)
    if mode == "tube":
        d0 = curve.fiber_distance(th, z.ravel()).reshape(z.shape)
        mask &= d0 < r
    out = np.zeros(z.shape + (3,), dtype=np.uint8)
    out[mask] = (255, 255, 255)
    return out


def render_parameter_space(kind: str = "mandelbrot_c", center: complex = -0.5, width: float = 3.0,
                           W: int = 256, H: int = 256, max_iter: int = 200,
                           escape_radius: float = 2.0):
    """Escape time of the critical orbit: z**2 + c from 0, or lam z + z**2 from -lam/2."""
    if kind not in ("mandelbrot_c", "lambda"):
        raise ValueError("kind must be 'mandelbrot_c' or 'lambda'")
    p = pixel_grid(center, width, W, H)
    steps = critical_escape(p.ravel(), 0 if kind == "mandelbrot_c" else 1, max_iter, escape_radius)
    status = np.where(steps >= 0, 1, 0).astype(np.int8)
    return escape_colors(status.reshape(p.shape), np.maximum(steps, 0).reshape(p.shape), max_iter)


def parameter_escape_steps(kind: str, params, max_iter: int = 200, escape_radius: float = 2.0):
    """Escape step per parameter value (-1 when the critical orbit stays bounded)."""
    return critical_escape(np.asarray(params, dtype=complex), 0 if kind == "mandelbrot_c" else 1,
                           max_iter, escape_radius)
