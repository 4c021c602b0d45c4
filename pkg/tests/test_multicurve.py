import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import multicurves as mc
from multicurves import MultiCurve, segment, project, unfold, lift_map
from multicurves.core import AffineFamily, FibredMap
from multicurves.errors import DegenerateCurveError, GridError


def circle(M, n=2):
    return MultiCurve([np.exp(2j * np.pi * np.arange(M) / M)], n)


def test_segments():
    one = MultiCurve([0.3 + 0.2 * np.exp(2j * np.pi * np.arange(64) / 64)], 1)
    for th in (0.0, 0.25, 0.6):
        # 0.6 is off the 64-node grid: linear interpolation error ~ 1e-3
        assert segment(one, 1, th) == pytest.approx(0.3 + 0.2 * np.exp(2j * np.pi * th), abs=1e-3)
    assert segment(one, 1, 0.25) == one.components[0][16]
    c = circle(64)
    assert segment(c, 1, 0.0) == pytest.approx(1)
    assert segment(c, 2, 0.0) == pytest.approx(-1)
    assert segment(c, 1, 1.0) == segment(c, 2, 0.0)
    with pytest.raises(IndexError):
        segment(c, 3, 0.0)
    with pytest.raises(IndexError):
        segment(c, 0, 0.0)


def test_project_examples():
    g = np.exp(2j * np.pi * np.arange(64) / 64)
    c = project(g, 2)
    assert np.allclose(sorted(c.fiber(0.0).ravel(), key=lambda z: z.real), [-1, 1])
    one = project(0.3 + 0.1 * g, 1)
    assert one.fiber(0.25).shape == (1, 1)
    st = mc.build_static_two_curve(0.1, 0.0, 256)
    assert np.allclose(sorted(st.curve.fiber(0.0).ravel().real), [0.4, 0.6])
    with pytest.raises(GridError):
        project(np.ones(63) + np.arange(63), 2)


def test_fiber_cardinality():
    st = mc.build_static_two_curve(0.1, 0.1, 512)
    fib = st.curve.fibers()
    assert fib.shape == (256, 1, 2)
    assert np.all(np.abs(fib[:, 0, 0] - fib[:, 0, 1]) > 0.1)


def test_unfold_roundtrip_and_base_choice():
    g = np.exp(2j * np.pi * np.arange(64) / 64)
    c = project(g, 2)
    assert np.array_equal(unfold(c, 0, 0).samples, g)
    u1 = unfold(c, 0, 1).samples
    assert np.array_equal(u1, np.roll(g, -32))
    assert np.allclose(u1, np.exp(2j * np.pi * (np.arange(64) / 64 + 0.5)))
    one = project(0.5 + 0.1 * g, 1)
    assert np.array_equal(unfold(one).samples, one.components[0])


@given(st.integers(1, 4), st.integers(3, 7), st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_unfold_project_property(n, logM, seed):
    M = 2**logM * n
    r = np.random.default_rng(seed)
    th = np.arange(M) / M
    g = (1 + 0.2 * r.random()) * np.exp(2j * np.pi * th) + 0.05 * r.random() * np.exp(4j * np.pi * th)
    c = project(g, n)
    assert np.array_equal(unfold(c, 0, 0).samples, g)
    outs = [unfold(c, 0, j).samples for j in range(n)]
    for j, u in enumerate(outs):
        assert np.array_equal(u, np.roll(g, -j * (M // n)))
    assert len({u.tobytes() for u in outs}) == n


def test_degenerate_curves_rejected():
    M = 64
    th = np.arange(M) / M
    fig8 = np.sin(2 * np.pi * th) + 1j * np.sin(4 * np.pi * th)
    with pytest.raises(DegenerateCurveError):
        MultiCurve([fig8], 1)
    jump = np.exp(2j * np.pi * th)
    jump[10] += 1.0
    with pytest.raises(DegenerateCurveError):
        MultiCurve([jump], 1)
    with pytest.raises(DegenerateCurveError):
        MultiCurve([np.ones(M)], 2)
    # a constant 1-curve is a fine degenerate "point" curve
    MultiCurve([np.full(M, 0.5 + 0j)], 1)
    with pytest.raises(DegenerateCurveError):
        MultiCurve([np.full(M, 0.5 + 0j), np.full(M, 0.5 + 0j)], 1)


def test_lift_map_examples():
    F = FibredMap(0.01, mc.Parabolic2Loop(0.1, 0.1))
    assert lift_map(F, 1, 0).rotation == F.alpha
    L = lift_map(F.with_alpha(0.0), 2, 0)
    assert L.rotation == 0
    th = np.arange(16) / 16
    assert np.allclose(L.eval_fiber(th, 0.3), 0.09 + F.loop(2 * th % 1))
    assert lift_map(F, 2, 1).rotation == pytest.approx(0.505)
    with pytest.raises(ValueError):
        lift_map(F, 2, 2)


@pytest.mark.parametrize("n,tau", [(1, 0), (2, 0), (2, 1), (3, 2)])
def test_commutation(n, tau):
    F = FibredMap(mc.DEFAULT_ALPHA, mc.Parabolic2Loop(0.1, 0.1))
    assert lift_map(F, n, tau).commutation_defect(256) <= 1e-12


def test_covering_deck():
    cov = mc.Covering(3, 1)
    th = np.linspace(0, 1, 17, endpoint=False)
    d = np.abs(cov.project(cov.deck(th)) - cov.project(th))
    assert np.all(np.minimum(d, 1 - d) < 1e-12)


def test_static_invariance_residuals(static_curve):
    F, c = static_curve.fibred_map, static_curve.curve
    assert mc.invariance_residual(F, c, 0) <= 1e-12
    assert mc.invariance_residual(F, c, 1) >= 0.1


def test_detection_examples(tau0):
    assert mc.detect_jumping_integer(tau0.base_map, tau0.curve) == 0
    t1 = mc.tau1_period2(0.05, mc.DEFAULT_ALPHA, 1024)
    assert mc.detect_jumping_integer(t1.base_map, t1.curve) == 1


def test_example_foliation_curve():
    # horizontal translation of the fiber coordinate, written on the unit
    # circle: z -> e^{2 pi i alpha / 2} z preserves the 2-curve e^{2 pi i theta}
    alpha = 0.01
    M = 4096
    th = np.arange(M) / M
    c = MultiCurve([np.exp(2j * np.pi * th)], 2, interpolation="fourier")
    F = FibredMap(alpha, None, AffineFamily.constant(np.exp(1j * np.pi * alpha), 0))
    res = mc.jumping_residuals(F, c)
    assert res[0] <= 1e-12 and res[1] > 1
    assert mc.detect_jumping_integer(F, c) == 0
    lin = MultiCurve([np.exp(2j * np.pi * th)], 2)
    assert mc.invariance_residual(F, lin, 0) < 1e-6


def test_detection_ambiguous():
    M = 64
    c = MultiCurve([np.full(M, 0.1 + 0j), np.full(M, 0.9 + 0j)], 1)
    F = FibredMap(0.0, None, None)
    assert mc.detect_jumping_integer(F, c) == 0
    close = MultiCurve([np.exp(2j * np.pi * np.arange(M) / M) * 1e-7], 2)
    with pytest.raises(DegenerateCurveError):
        mc.detect_jumping_integer(F, close)


def test_detection_base_point_relabel(tau0):
    c = tau0.curve
    F = tau0.base_map
    r0 = mc.jumping_residuals(F, c)
    relabeled = MultiCurve([unfold(c, 0, 1).samples], 2)
    r1 = mc.jumping_residuals(F, relabeled)
    assert min(r0) == pytest.approx(min(r1), abs=1e-12)
    assert mc.detect_jumping_integer(F, relabeled) == mc.detect_jumping_integer(F, c)


def test_lagrange_identity_constant():
    M = 64
    c = MultiCurve([np.where(np.arange(M) < 32, 1.0, -1.0) + 0j], 2, validate=False)
    # unfolding that jumps is not a curve, but fibers {1, -1} are all that matter here
    F = mc.lagrange_invariant_map(c, 0.0, 0)
    w = np.array([0.3, -2 + 1j])
    assert np.allclose(F.eval_fiber(0.2, w), w)


def test_lagrange_static_two_curve_is_affine_shift():
    a = mc.DEFAULT_ALPHA
    st = mc.build_static_two_curve(0.1, 0.0, 4096)
    post = mc.multicurve.lagrange_family(st.curve, a, 0)
    assert post.kind == "affine"
    assert np.allclose(post.m, np.exp(1j * np.pi * a), atol=1e-6)
    assert np.allclose(post.d, (1 - np.exp(1j * np.pi * a)) / 2, atol=1e-6)
    F = mc.lagrange_invariant_map(st.curve, a, 0)
    assert mc.invariance_residual(F, st.curve, 0) <= 1e-9


def test_lagrange_mobius_three_points():
    M = 3 * 128
    th = np.arange(M) / M
    g = 0.7 * np.exp(2j * np.pi * th) + 0.1 * np.exp(-4j * np.pi * th)
    c = MultiCurve([g], 3)
    for tau in (0, 1, 2):
        F = mc.lagrange_invariant_map(c, 0.013, tau)
        assert F.post.kind == "mobius"
        assert mc.invariance_residual(F, c, tau) <= 1e-9


def test_lagrange_too_many_nodes():
    M = 64
    c = MultiCurve([np.exp(2j * np.pi * np.arange(M) / M)], 4)
    with pytest.raises(NotImplementedError):
        mc.lagrange_invariant_map(c, 0.01, 0)
