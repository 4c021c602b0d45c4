import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

import multicurves as mc
from multicurves.errors import ConditionError, GridError
from multicurves.quadratic import (affine_lagrange, fixed_points, log_A, normalization,
                                   slope_A, static_unfolding, winding_number)

eps_s = st.floats(0.01, 0.3)
x0_s = st.floats(0.0, 0.24)


def test_fixed_points_examples():
    assert fixed_points(0) == (1, 0)
    z1, z2 = fixed_points(0.25)
    assert z1 == z2 == 0.5
    z1, z2 = fixed_points(-2)
    assert (z1, z2) == (2, -1)


def test_static_unfolding_values():
    assert static_unfolding(0.1, 0.0, 0.0) == pytest.approx(0.6)
    assert static_unfolding(0.1, 0.0, 0.5) == pytest.approx(0.4)
    assert abs(static_unfolding(0.1, 0.1, 0.0) - 0.6048809) < 1e-7


def test_static_curve_exact(static_curve):
    assert static_curve.fixed_point_residual() < 1e-15
    assert mc.invariance_residual(static_curve.fibred_map, static_curve.curve, 0) < 1e-15
    assert mc.detect_jumping_integer(static_curve.fibred_map, static_curve.curve) == 0


def test_static_rejections():
    with pytest.raises(ConditionError):
        mc.build_static_two_curve(0.1, 0.3)
    with pytest.raises(ConditionError):
        mc.build_static_two_curve(0.6, 0.1)
    with pytest.raises(GridError):
        mc.build_static_two_curve(0.1, 0.1, 1000)


def test_affine_lagrange_examples():
    m, d = affine_lagrange((0, 1), (1, 3))
    assert (m, d) == (2, 1)
    with pytest.raises(mc.DegenerateCurveError):
        affine_lagrange((1, 1), (0, 2))


def test_tau0_identity_at_zero_rotation():
    c = mc.post_compose_tau0(0.1, 0.1, 0.0, 1024)
    assert np.allclose(c.base_map.post.m, 1, atol=1e-15)
    assert np.allclose(c.base_map.post.d, 0, atol=1e-15)
    assert c.residual < 1e-15


def test_tau0_slope_matches_closed_form(tau0):
    K = tau0.curve.K
    phi = np.arange(K) / K
    A = slope_A(0.1, mc.DEFAULT_ALPHA, phi)
    assert np.abs(tau0.base_map.post.m - A).max() < 1e-5
    assert np.abs(tau0.base_map.post.d - (1 - A) / 2).max() < 1e-5


def test_tau0_fourier_exactness():
    c = mc.post_compose_tau0(0.1, 0.0, mc.DEFAULT_ALPHA, 1024, "fourier")
    # at x0 = 0 the curve is a trigonometric polynomial; the multiplier is 1
    assert c.residual < 1e-12
    assert abs(mc.multiplier(c.base_map, c.curve).kappa - 1) < 1e-12


def test_normalization_special_cases():
    a = mc.DEFAULT_ALPHA
    nd = normalization(0.0, a, 256)
    assert np.allclose(nd.u, np.exp(-1j * np.pi * a), atol=1e-15)
    nd = normalization(0.1, 0.0, 256)
    assert np.allclose(nd.u, 1, atol=1e-15)
    assert np.allclose(nd.A, 1, atol=1e-15)
    with pytest.raises(ValueError):
        normalization(0.1, a, 256, J=0)


def test_normalization_functional_equation():
    nd = normalization(0.1, mc.DEFAULT_ALPHA, 2048, 60)
    assert nd.residual < 1e-12
    assert nd.residual == pytest.approx(
        np.abs(nd.u_at(np.arange(2048) / 2048 + mc.DEFAULT_ALPHA) - nd.A * nd.u**2).max(), abs=1e-15)


def test_canonical_zero_rotation():
    cc = mc.canonical_two_curve(0.1, 0.1, 0.0, 1024)
    st0 = mc.build_static_two_curve(0.1, 0.1, 1024)
    assert np.allclose(cc.curve.components[0], st0.unfolding, atol=1e-15)
    assert cc.residual < 1e-14


def test_canonical_construction(canonical):
    assert canonical.convention == "conjugated/cover"
    assert canonical.residual <= 1e-6
    assert canonical.winding_about_quarter == 1
    # the loop is in pure quadratic form: no post-composition
    assert canonical.base_map.post is None
    assert canonical.log_integrals["mean_log_abs_u_over_2"] == pytest.approx(-np.log(2), abs=1e-10)
    assert canonical.log_integrals["mean_log_abs_2A"] == pytest.approx(np.log(2), abs=1e-10)
    # the other conventions do not give invariant curves
    others = [v for k, v in canonical.residuals.items() if k != "conjugated/cover"]
    assert min(others) > 1e-5


def test_winding_number():
    t = np.arange(64) / 64
    assert winding_number(np.exp(2j * np.pi * t)) == 1
    assert winding_number(np.exp(-4j * np.pi * t)) == -2
    assert winding_number(2 + np.exp(2j * np.pi * t)) == 0


def test_tau1_construction():
    c = mc.tau1_period2(0.05, mc.DEFAULT_ALPHA, 4096)
    assert c.static_swap_residual < 1e-14
    assert c.tau == 1
    assert c.residual < 1e-9
    c0 = mc.tau1_period2(0.05, 0.0, 1024)
    assert c0.tau == 1 and c0.residual < 1e-14


# ------------------------------------------------------------ properties

@given(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
@settings(max_examples=200)
def test_fixed_point_identity(c):
    for z in fixed_points(c):
        assert abs(z * z + c - z) <= 1e-12 * (1 + abs(z) ** 2)


@given(eps_s, x0_s, st.floats(0, 1))
@settings(max_examples=200)
def test_unfolding_consistency(eps, x0, theta):
    assume(eps**2 / (0.25 - eps**2 * x0) < 1)
    loop = mc.Parabolic2Loop(eps, x0)
    g = static_unfolding(eps, x0, theta)
    h = static_unfolding(eps, x0, theta + 0.5)
    c = loop(2 * theta)
    assert abs(g * g + c - g) < 1e-13
    # the two lifts over one base point are the two fixed points: they are swapped by theta -> theta + 1/2
    assert abs(g + h - 1) < 1e-14


@given(eps_s, x0_s)
@settings(max_examples=25, deadline=None)
def test_static_multiplier_identity(eps, x0):
    assume(eps**2 / (0.25 - eps**2 * x0) < 0.9)
    s = mc.build_static_two_curve(eps, x0, 2048)
    k = mc.multiplier(s.fibred_map, s.curve).kappa
    assert abs(k - np.sqrt(1 - 4 * eps**2 * x0)) <= 1e-8


@given(x0_s, st.floats(0, 0.5))
@settings(max_examples=50, deadline=None)
def test_log_slope_zero_mean(x0, alpha):
    phi = np.arange(512) / 512
    assert abs(np.mean(log_A(x0, alpha, phi).real)) < 1e-12
    assert np.allclose(np.exp(log_A(x0, alpha, phi)), slope_A(x0, alpha, phi), atol=1e-14)
